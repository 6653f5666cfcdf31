//! JSON-over-HTTP API over a read-only artifact set.

use std::collections::BTreeMap;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use combocopy::arbitrator::filter_scored;
use combocopy::enhancement::Verdict;
use combocopy::pipeline::Artifacts;
use combocopy::selection::{select_pattern, PatternKey};
use combocopy::Error;

/// Upper bound on `n` for one combinations request.
pub const MAX_COMBINATIONS: usize = 200;
/// Upper bound on the beam width a request may ask for.
pub const MAX_BEAM: usize = 16;

type Shared = Arc<Artifacts>;

pub fn router(artifacts: Artifacts) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/topics", get(topics))
        .route("/combinations", post(combinations))
        .route("/copywriting", post(copywriting))
        .route("/assess", post(assess))
        .fallback(|| async {
            ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint")
        })
        .with_state(Arc::new(artifacts))
}

pub async fn serve(artifacts: Artifacts, bind: &str) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(bind)
        .await
        .map_err(|e| anyhow::anyhow!("cannot bind {bind}: {e}"))?;
    log::info!("listening on {}", listener.local_addr()?);
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(artifacts))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub code: &'static str,
    pub message: String,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            body: ErrorBody {
                code,
                message: message.into(),
            },
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "invalid_request", message)
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let root = match &e {
            Error::Stage { source, .. } => source.as_ref(),
            other => other,
        };
        match root {
            Error::UnknownProduct(_) | Error::UnknownProductInCombination { .. } => {
                Self::new(StatusCode::NOT_FOUND, "unknown_product", e.to_string())
            }
            Error::Invalid { .. }
            | Error::Empty(_)
            | Error::Insufficient(_)
            | Error::UnknownCharacter(_)
            | Error::TooLong { .. } => Self::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "unprocessable",
                e.to_string(),
            ),
            _ => Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        Self::new(r.status(), "invalid_json", r.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(serde_json::json!({ "error": self.body }))).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

/// Runs CPU-bound work off the async executor.
async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ApiError> + Send + 'static,
) -> ApiResult<T> {
    match tokio::task::spawn_blocking(f).await {
        Ok(r) => r.map(Json),
        Err(e) => Err(ApiError::new(
            StatusCode::INTERNAL_SERVER_ERROR,
            "internal",
            e.to_string(),
        )),
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Health {
    pub version: String,
    pub artifacts: BTreeMap<String, String>,
}

async fn health(State(a): State<Shared>) -> Json<Health> {
    Json(Health {
        version: env!("CARGO_PKG_VERSION").to_string(),
        artifacts: a.checksums.clone(),
    })
}

async fn topics(State(a): State<Shared>) -> Json<Vec<String>> {
    Json(a.catalog.topics())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CombinationsRequest {
    pub topic: String,
    pub n: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SuggestedCombination {
    pub products: Vec<String>,
    pub score: f64,
    pub pattern: Option<PatternKey>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CombinationsResponse {
    pub combinations: Vec<SuggestedCombination>,
}

async fn combinations(
    State(a): State<Shared>,
    body: Result<Json<CombinationsRequest>, JsonRejection>,
) -> ApiResult<CombinationsResponse> {
    let Json(req) = body?;
    if req.n == 0 || req.n > MAX_COMBINATIONS {
        return Err(ApiError::bad_request(format!(
            "n must be in 1..={MAX_COMBINATIONS}"
        )));
    }
    if !a.catalog.topics().contains(&req.topic) {
        return Err(ApiError::new(
            StatusCode::NOT_FOUND,
            "unknown_topic",
            format!("unknown topic `{}`", req.topic),
        ));
    }
    blocking(move || {
        let candidates = select_pattern(&a.catalog, &a.patterns, &req.topic, req.n, a.config.seed)?;
        let kept = filter_scored(&a.strict, &candidates, &a.catalog, a.strict_threshold())?;
        Ok(CombinationsResponse {
            combinations: kept
                .into_iter()
                .map(|(c, score)| SuggestedCombination {
                    products: c.products,
                    score,
                    pattern: c.pattern,
                })
                .collect(),
        })
    })
    .await
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CopywritingRequest {
    pub product_ids: Vec<String>,
    #[serde(default)]
    pub beam: Option<usize>,
    /// Zero keeps the request's product order; other values shuffle it.
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CopywritingResponse {
    pub copy: String,
    pub approved: bool,
    pub verdict: Verdict,
    pub score: f64,
}

async fn copywriting(
    State(a): State<Shared>,
    body: Result<Json<CopywritingRequest>, JsonRejection>,
) -> ApiResult<CopywritingResponse> {
    let Json(req) = body?;
    let mut decode = a.config.decode.clone();
    if let Some(beam) = req.beam {
        if beam == 0 || beam > MAX_BEAM {
            return Err(ApiError::bad_request(format!(
                "beam must be in 1..={MAX_BEAM}"
            )));
        }
        decode.beam_size = beam;
    }
    blocking(move || {
        let combo = a.combination_of(&req.product_ids)?;
        let score = a.strict.score(&combo, &a.catalog)?;
        let (g, _) = a.generate(&combo, &decode, req.seed.unwrap_or(0))?;
        Ok(CopywritingResponse {
            copy: g.copy,
            approved: g.verdict.approved,
            verdict: g.verdict,
            score,
        })
    })
    .await
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AssessRequest {
    pub product_ids: Vec<String>,
    pub copy: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AssessResponse {
    pub verdict: Verdict,
}

async fn assess(
    State(a): State<Shared>,
    body: Result<Json<AssessRequest>, JsonRejection>,
) -> ApiResult<AssessResponse> {
    let Json(req) = body?;
    blocking(move || {
        let combo = a.combination_of(&req.product_ids)?;
        Ok(AssessResponse {
            verdict: a.assess(&combo, &req.copy)?,
        })
    })
    .await
}
