//! Local HTTP service backing the annotation tool.
//!
//! Every endpoint is stateless; the only shared data is the read-only
//! configuration, schema and reference face.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use pareanim_core::bezier::Point3;
use pareanim_core::io::{serialize_config, AnnotationDoc, PipelineConfig};
use pareanim_core::pipeline::Animator;
use pareanim_core::shape::{BoundarySchema, LandmarkFrame, ReferenceFace};
use pareanim_core::warp::Image;
use pareanim_core::Error;
use serde::{Deserialize, Serialize};

use crate::{fit_points, resolve_image_ref, FitRequest};

#[derive(Debug, Clone)]
pub struct ServiceState {
    pub config: PipelineConfig,
    pub schema: BoundarySchema,
    pub reference: ReferenceFace,
    /// Directory that annotation `image_ref` paths are resolved against.
    pub image_root: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreviewRequest {
    pub annotation: AnnotationDoc,
    /// One frame in the landmark sequence layout.
    pub landmark_frame: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage: Option<String>,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = if e.stage().is_some() {
            StatusCode::UNPROCESSABLE_ENTITY
        } else {
            StatusCode::BAD_REQUEST
        };
        ApiError {
            status,
            body: ErrorBody {
                error: e.to_string(),
                stage: e.stage().map(str::to_owned),
            },
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let json = serde_json::to_string(&self.body).expect("error body serializes");
        (self.status, [(header::CONTENT_TYPE, "application/json")], json).into_response()
    }
}

fn json_response(body: String) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| Error::from(e).into())
}

async fn health() -> &'static str {
    "ok"
}

async fn config(State(state): State<Arc<ServiceState>>) -> Response {
    json_response(serialize_config(&state.config))
}

async fn fit(State(state): State<Arc<ServiceState>>, body: Bytes) -> Result<Response, ApiError> {
    let req: FitRequest = parse_body(&body)?;
    let out = fit_points(&req, state.config.fit_segments)?;
    Ok(json_response(
        serde_json::to_string(&out).expect("fit serializes"),
    ))
}

/// Synthesizes one frame; shares the per-frame path with the batch pipeline.
pub fn render_preview(state: &ServiceState, req: &PreviewRequest) -> Result<Vec<u8>, Error> {
    req.annotation.validate(&state.schema)?;
    let points = req
        .landmark_frame
        .iter()
        .map(|p| Point3::new(p[0], p[1], p[2]))
        .collect();
    let frame = LandmarkFrame::new(0, points)?;
    let image = Image::load(resolve_image_ref(&state.image_root, &req.annotation.image_ref)?)?;
    let animator = Animator::new(
        &state.config,
        &state.schema,
        &req.annotation,
        &state.reference,
        image,
    )?;
    animator.frame(&frame)?.image.encode_png()
}

async fn preview(State(state): State<Arc<ServiceState>>, body: Bytes) -> Result<Response, ApiError> {
    let req: PreviewRequest = parse_body(&body)?;
    let png = tokio::task::spawn_blocking(move || render_preview(&state, &req))
        .await
        .map_err(|e| ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            body: ErrorBody {
                error: e.to_string(),
                stage: None,
            },
        })??;
    Ok(([(header::CONTENT_TYPE, "image/png")], png).into_response())
}

pub fn router(state: ServiceState) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/config", get(config))
        .route("/fit", post(fit))
        .route("/preview", post(preview))
        .with_state(Arc::new(state))
}

pub async fn serve(state: ServiceState, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}
