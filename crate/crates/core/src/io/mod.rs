//! File formats: annotations, landmark sequences, pipeline configuration,
//! metrics reports and binary flow dumps.

mod annotation;
mod config;
mod flow;
mod landmarks;
mod report;

pub use annotation::{
    parse_annotation, serialize_annotation, AnnotatedBranch, AnnotationDoc, MAX_CONTROLS, MIN_CONTROLS,
};
pub use config::{parse_config, serialize_config, PipelineConfig};
pub use flow::{flow_file_len, read_flow, write_flow, FLOW_MAGIC};
pub use landmarks::{parse_landmarks, serialize_landmarks, LandmarkSequenceDoc};
pub use report::{FrameDiagnostic, MetricsReport, PartRecord};
