//! HTTP service over an immutable, atomically swappable library snapshot.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, State};
use axum::http::{header, HeaderName, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::Serialize;
use tower_http::cors::{AllowOrigin, CorsLayer};

use crate::api::{complete_output, parse_output, sketch_from_json, CompleteRequest};
use crate::completion::CompletionOptions;
use crate::concept::ConceptLibrary;
use crate::error::{Error, Result};
use crate::eval::{library_stats, LibraryStats};
use crate::induction::parse::parse_sketch;
use crate::sketch::corpus::{error_offset, read_sketches, SCHEMA_VERSION};
use crate::sketch::{QuantizationSpec, SketchGraph};

pub const LIBRARY_HASH: HeaderName = HeaderName::from_static("x-library-hash");
pub const ROUNDTRIP: HeaderName = HeaderName::from_static("x-roundtrip");

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub bind: SocketAddr,
    pub library_path: PathBuf,
    /// Corpus parsed at startup for usage statistics.
    pub corpus_path: Option<PathBuf>,
    pub max_body_bytes: usize,
    /// Allowed browser origin; any origin when `None`.
    pub cors_origin: Option<String>,
}

impl ServiceConfig {
    pub fn new(library_path: PathBuf) -> Self {
        Self {
            bind: ([127, 0, 0, 1], 8080).into(),
            library_path,
            corpus_path: None,
            max_body_bytes: 2 << 20,
            cors_origin: None,
        }
    }
}

pub struct Snapshot {
    pub library: ConceptLibrary,
    pub hash: String,
    pub library_json: String,
    pub stats: LibraryStats,
}

impl Snapshot {
    pub fn new(library: ConceptLibrary, corpus: &[SketchGraph]) -> Result<Self> {
        let parses = corpus.iter().map(|s| parse_sketch(s, &library)).collect::<Result<Vec<_>>>()?;
        let decomps: Vec<_> = parses.iter().map(|p| &p.decomposition).collect();
        let stats = library_stats(&library, &decomps);
        Ok(Self { hash: library.content_hash(), library_json: library.to_json(), library, stats })
    }
}

pub struct AppState {
    snapshot: RwLock<Arc<Snapshot>>,
    pub quant: QuantizationSpec,
}

impl AppState {
    pub fn new(snapshot: Snapshot) -> Self {
        Self { snapshot: RwLock::new(Arc::new(snapshot)), quant: QuantizationSpec::default() }
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.snapshot.read().unwrap_or_else(|e| e.into_inner()).clone()
    }

    /// Replaces the library; in-flight requests keep the snapshot they started with.
    pub fn swap(&self, snapshot: Snapshot) {
        *self.snapshot.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(snapshot);
    }
}

#[derive(Serialize)]
struct ErrorBody {
    schema_version: u32,
    error: String,
}

fn error(status: StatusCode, message: String) -> Response {
    (status, axum::Json(ErrorBody { schema_version: SCHEMA_VERSION, error: message })).into_response()
}

fn json_response(snap: &Snapshot, body: String) -> Response {
    let mut r = ([(header::CONTENT_TYPE, "application/json")], body).into_response();
    if let Ok(v) = HeaderValue::from_str(&snap.hash) {
        r.headers_mut().insert(LIBRARY_HASH, v);
    }
    r
}

fn bad_request(text: &str, e: Error) -> Response {
    if let Err(je) = serde_json::from_str::<serde_json::Value>(text) {
        return error(StatusCode::BAD_REQUEST, format!("parse error at offset {}", error_offset(text, &je)));
    }
    error(StatusCode::BAD_REQUEST, e.to_string())
}

fn utf8(body: &Bytes) -> std::result::Result<&str, Response> {
    std::str::from_utf8(body).map_err(|e| error(StatusCode::BAD_REQUEST, format!("parse error at offset {}", e.valid_up_to())))
}

async fn parse(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let text = match utf8(&body) {
        Ok(t) => t,
        Err(r) => return r,
    };
    let snap = state.snapshot();
    let sketch = match sketch_from_json(text, "request", &state.quant) {
        Ok(s) => s,
        Err(e) => return bad_request(text, e),
    };
    match parse_output(&sketch, &snap.library, &state.quant, true) {
        Ok(out) => {
            let ok = out.roundtrip;
            let mut r = json_response(&snap, serde_json::to_string(&out).unwrap_or_default());
            r.headers_mut().insert(ROUNDTRIP, HeaderValue::from_static(if ok { "ok" } else { "failed" }));
            r
        }
        Err(e) => error(StatusCode::BAD_REQUEST, e.to_string()),
    }
}

async fn complete(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let text = match utf8(&body) {
        Ok(t) => t,
        Err(r) => return r,
    };
    let snap = state.snapshot();
    let req: CompleteRequest = match serde_json::from_str(text) {
        Ok(r) => r,
        Err(e) => return bad_request(text, e.into()),
    };
    let partial = match sketch_from_json(&req.sketch.to_string(), "request", &state.quant) {
        Ok(s) => s,
        Err(e) => return error(StatusCode::BAD_REQUEST, e.to_string()),
    };
    let opts = CompletionOptions { top_k: req.top_k.unwrap_or(5), quant: state.quant };
    match complete_output(&partial, &snap.library, &opts) {
        Ok(out) => json_response(&snap, serde_json::to_string(&out).unwrap_or_default()),
        Err(e) => error(StatusCode::BAD_REQUEST, e.to_string()),
    }
}

async fn library(State(state): State<Arc<AppState>>) -> Response {
    let snap = state.snapshot();
    json_response(&snap, snap.library_json.clone())
}

#[derive(Serialize)]
struct StatsOutput<'a> {
    schema_version: u32,
    library_hash: &'a str,
    #[serde(flatten)]
    stats: &'a LibraryStats,
}

async fn stats(State(state): State<Arc<AppState>>) -> Response {
    let snap = state.snapshot();
    let body = StatsOutput { schema_version: SCHEMA_VERSION, library_hash: &snap.hash, stats: &snap.stats };
    json_response(&snap, serde_json::to_string(&body).unwrap_or_default())
}

async fn healthz() -> &'static str {
    "ok"
}

pub fn router(state: Arc<AppState>, max_body_bytes: usize, cors_origin: Option<&str>) -> Router {
    let origin = match cors_origin.and_then(|o| HeaderValue::from_str(o).ok()) {
        Some(o) => AllowOrigin::exact(o),
        None => AllowOrigin::any(),
    };
    let cors = CorsLayer::new()
        .allow_origin(origin)
        .allow_methods([axum::http::Method::GET, axum::http::Method::POST])
        .allow_headers([header::CONTENT_TYPE])
        .expose_headers([LIBRARY_HASH, ROUNDTRIP]);
    Router::new()
        .route("/v1/parse", post(parse))
        .route("/v1/complete", post(complete))
        .route("/v1/library", get(library))
        .route("/v1/stats", get(stats))
        .route("/healthz", get(healthz))
        .layer(DefaultBodyLimit::max(max_body_bytes))
        .layer(cors)
        .with_state(state)
}

fn load_snapshot(config: &ServiceConfig, quant: &QuantizationSpec) -> Result<Snapshot> {
    let library = ConceptLibrary::load(&config.library_path)?;
    let corpus = match &config.corpus_path {
        Some(p) => read_sketches(p, quant)?,
        None => Vec::new(),
    };
    Snapshot::new(library, &corpus)
}

/// Loads the library (refusing to start if it is invalid) and serves until Ctrl-C.
/// On Unix, SIGHUP reloads the library from disk.
pub async fn serve(config: ServiceConfig) -> Result<()> {
    let state = Arc::new(AppState::new(load_snapshot(&config, &QuantizationSpec::default())?));
    #[cfg(unix)]
    {
        let state = state.clone();
        let config = config.clone();
        tokio::spawn(async move {
            use tokio::signal::unix::{signal, SignalKind};
            let Ok(mut hup) = signal(SignalKind::hangup()) else { return };
            while hup.recv().await.is_some() {
                match load_snapshot(&config, &state.quant) {
                    Ok(s) => {
                        log::info!("library reloaded: {}", s.hash);
                        state.swap(s);
                    }
                    Err(e) => log::error!("library reload failed: {e}"),
                }
            }
        });
    }
    let app = router(state, config.max_body_bytes, config.cors_origin.as_deref());
    let listener = tokio::net::TcpListener::bind(config.bind).await?;
    log::info!("listening on {}", config.bind);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
