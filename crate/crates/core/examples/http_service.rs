//! Drives the HTTP router in-process: parse, complete and library endpoints.

use std::sync::Arc;

use axum::body::Body;
use axum::http::Request;
use http_body_util::BodyExt;
use tower::ServiceExt;

use sketch_concepts::service::{router, AppState, Snapshot, LIBRARY_HASH, ROUNDTRIP};
use sketch_concepts::sketch::corpus::SketchRecord;
use sketch_concepts::sketch::QuantizationSpec;
use sketch_concepts::synth;

async fn call(app: &axum::Router, method: &str, uri: &str, body: String) -> (u16, Option<String>, Option<String>, String) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json").body(Body::from(body)).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status().as_u16();
    let header = |h| resp.headers().get(h).map(|v: &axum::http::HeaderValue| v.to_str().unwrap().to_string());
    let (hash, rt) = (header(&LIBRARY_HASH), header(&ROUNDTRIP));
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, hash, rt, String::from_utf8_lossy(&bytes).into_owned())
}

#[tokio::main]
async fn main() -> sketch_concepts::Result<()> {
    let quant = QuantizationSpec::default();
    let state = Arc::new(AppState::new(Snapshot::new(synth::slot_library(), &[synth::slot_sketch()])?));
    let app = router(state, 1 << 20, None);

    let sketch = serde_json::to_string(&SketchRecord::from_graph(&synth::slot_sketch(), &quant))?;
    let (status, hash, rt, body) = call(&app, "POST", "/v1/parse", sketch).await;
    let v: serde_json::Value = serde_json::from_str(&body)?;
    println!("parse: {status} library {hash:?} roundtrip {rt:?} concepts {}", v["concepts"]);

    let (status, _, _, body) = call(&app, "POST", "/v1/parse", "{\"primitives\": [".into()).await;
    println!("malformed: {status} {body}");

    // Move the frame's top line last, then drop it.
    let full = synth::slot_sketch();
    let mut order: Vec<usize> = (0..full.primitives.len()).filter(|&p| p != 3).collect();
    order.push(3);
    let partial = sketch_concepts::completion::remove_last(&synth::reorder_primitives(&full, &order), 1).sketch;
    let req = serde_json::json!({ "sketch": SketchRecord::from_graph(&partial, &quant), "top_k": 3 });
    let (status, _, _, body) = call(&app, "POST", "/v1/complete", req.to_string()).await;
    let v: serde_json::Value = serde_json::from_str(&body)?;
    for c in v["candidates"].as_array().into_iter().flatten() {
        println!("complete: {status} rank {} concept {} adds {} primitives", c["rank"], c["concept"], c["added_primitives"]);
    }

    let (status, _, _, body) = call(&app, "GET", "/v1/stats", String::new()).await;
    println!("stats: {status} {body}");
    Ok(())
}
