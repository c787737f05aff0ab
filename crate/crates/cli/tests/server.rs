mod common;

use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use monocat::cluster::{Limits, Seed};
use monocat_cli::server::{router, AppState};
use serde_json::{json, Value};
use tower::ServiceExt;

use common::assert_conforms;

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let builder = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => builder
            .header("content-type", "application/json")
            .body(Body::from(b.to_string()))
            .unwrap(),
        None => builder.body(Body::empty()).unwrap(),
    };
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = axum::body::to_bytes(resp.into_body(), usize::MAX).await.unwrap();
    let v = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    (status, v)
}

fn app() -> Router {
    router(Arc::new(AppState::new(Limits::default())))
}

async fn create(app: &Router, body: Value) -> String {
    let (st, v) = call(app, "POST", "/session", Some(body)).await;
    assert_eq!(st, StatusCode::OK, "{}", v);
    assert_conforms("session.schema.json", &v);
    v["session"].as_str().unwrap().to_string()
}

fn assert_error(st: StatusCode, v: &Value, want: StatusCode) {
    assert_eq!(st, want, "{}", v);
    assert_conforms("error.schema.json", v);
    assert_eq!(v["status"], json!(want.as_u16().to_string()));
}

#[tokio::test]
async fn unknown_session_is_404() {
    let app = app();
    let (st, v) = call(&app, "GET", "/session/nope/seed", None).await;
    assert_error(st, &v, StatusCode::NOT_FOUND);
    let (st, v) = call(&app, "POST", "/session/nope/mutate", Some(json!({"k": 1}))).await;
    assert_error(st, &v, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn bad_directions_are_rejected() {
    let app = app();
    let id = create(&app, json!({"type": "A3"})).await;
    // n = 3 mutable directions; 4..6 are frozen, 7 does not exist.
    for k in [4, 7] {
        let (st, v) = call(&app, "POST", &format!("/session/{}/mutate", id), Some(json!({"k": k}))).await;
        assert_error(st, &v, StatusCode::CONFLICT);
    }
    let (st, v) = call(&app, "POST", &format!("/session/{}/mutate", id), Some(json!({"k": 0}))).await;
    assert_error(st, &v, StatusCode::BAD_REQUEST);
    let (st, v) = call(&app, "POST", &format!("/session/{}/undo", id), None).await;
    assert_error(st, &v, StatusCode::CONFLICT);
}

#[tokio::test]
async fn unknown_type_is_400() {
    let app = app();
    let (st, v) = call(&app, "POST", "/session", Some(json!({"type": "Q7"}))).await;
    assert_error(st, &v, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn mutating_twice_restores_the_seed() {
    let app = app();
    let id = create(&app, json!({"type": "A3"})).await;
    let (_, before) = call(&app, "GET", &format!("/session/{}/seed", id), None).await;
    let uri = format!("/session/{}/mutate", id);
    let (st, first) = call(&app, "POST", &uri, Some(json!({"k": 2}))).await;
    assert_eq!(st, StatusCode::OK);
    assert_conforms("mutate-response.schema.json", &first);
    assert_eq!(first["relation"]["direction"], "2");
    assert_eq!(first["relation"]["old"], "x2");
    let (_, second) = call(&app, "POST", &uri, Some(json!({"k": "2"}))).await;
    assert_eq!(second["seed"]["seed"], before["seed"]);
    assert_eq!(second["seed"]["history"], json!(["2", "2"]));

    let (st, undone) = call(&app, "POST", &format!("/session/{}/undo", id), None).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(undone["seed"], first["seed"]["seed"]);
    assert_eq!(undone["history"], json!(["2"]));
}

#[tokio::test]
async fn seed_json_roundtrips_byte_identically() {
    let app = app();
    let id = create(&app, json!({"type": "D4"})).await;
    for k in [1, 2, 4] {
        call(&app, "POST", &format!("/session/{}/mutate", id), Some(json!({"k": k}))).await;
    }
    let (_, v) = call(&app, "GET", &format!("/session/{}/seed", id), None).await;
    assert_conforms("seed.schema.json", &v["seed"]);
    for var in v["seed"]["vars"].as_array().unwrap() {
        assert_conforms("laurent.schema.json", var);
    }
    let seed = Seed::from_json(&v["seed"]).unwrap();
    let again = seed.to_json();
    assert_eq!(
        serde_json::to_string(&again).unwrap(),
        serde_json::to_string(&v["seed"]).unwrap()
    );
}

#[tokio::test]
async fn character_of_a_cluster_variable() {
    let app = app();
    let id = create(&app, json!({"type": "A3"})).await;
    call(&app, "POST", &format!("/session/{}/mutate", id), Some(json!({"k": 1}))).await;
    // After mutating at 1 the first position carries the positive simple root.
    let (st, v) = call(&app, "GET", &format!("/session/{}/char?var=1", id), None).await;
    assert_eq!(st, StatusCode::OK, "{}", v);
    assert_conforms("character.schema.json", &v);
    assert_eq!(v["label"], json!(["1", "0", "0"]));
    assert_eq!(v["character"]["terms"].as_array().unwrap().len(), 3);

    let (st, by_root) = call(&app, "GET", &format!("/session/{}/char?var=1,0,0", id), None).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(by_root["character"], v["character"]);

    // Frozen positions carry the frozen monomial itself.
    let (st, v) = call(&app, "GET", &format!("/session/{}/char?var=4", id), None).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(v["character"]["dimension"], "1");

    let (st, v) = call(&app, "GET", &format!("/session/{}/char?var=9", id), None).await;
    assert_error(st, &v, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn character_outside_level_one_is_422() {
    let app = app();
    let id = create(&app, json!({"type": "A2", "ell": 2})).await;
    let (st, v) = call(&app, "GET", &format!("/session/{}/char?var=1", id), None).await;
    assert_error(st, &v, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn atlas_endpoint() {
    let app = app();
    let (st, v) = call(&app, "GET", "/atlas?type=A3", None).await;
    assert_eq!(st, StatusCode::OK);
    assert_conforms("atlas.schema.json", &v);
    assert_eq!(v["counts"]["clusters"], "14");
    assert_eq!(v["counts"]["variables"], "9");
    assert_eq!(v["counts"]["frozen"], "3");
    let (_, cached) = call(&app, "GET", "/atlas?type=A3", None).await;
    assert_eq!(cached, v);
}

#[tokio::test]
async fn replay_is_deterministic() {
    let a = app();
    let b = app();
    let seq = [1, 3, 2, 1, 2, 3];
    let ia = create(&a, json!({"type": "A3"})).await;
    let ib = create(&b, json!({"type": "A3"})).await;
    for k in seq {
        call(&a, "POST", &format!("/session/{}/mutate", ia), Some(json!({"k": k}))).await;
        call(&b, "POST", &format!("/session/{}/mutate", ib), Some(json!({"k": k}))).await;
    }
    let (_, va) = call(&a, "GET", &format!("/session/{}/seed", ia), None).await;
    let (_, vb) = call(&b, "GET", &format!("/session/{}/seed", ib), None).await;
    assert_eq!(va, vb);
}

#[tokio::test]
async fn journal_survives_restart() {
    let dir = std::env::temp_dir().join(format!("monocat-journal-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("journal.jsonl");
    let _ = std::fs::remove_file(&path);

    let first = router(Arc::new(AppState::with_journal(Limits::default(), &path).unwrap()));
    let id = create(&first, json!({"type": "A3", "i0": [2]})).await;
    for k in [2, 1, 3] {
        call(&first, "POST", &format!("/session/{}/mutate", id), Some(json!({"k": k}))).await;
    }
    call(&first, "POST", &format!("/session/{}/undo", id), None).await;
    let (_, before) = call(&first, "GET", &format!("/session/{}/seed", id), None).await;
    drop(first);

    let second = router(Arc::new(AppState::with_journal(Limits::default(), &path).unwrap()));
    let (st, after) = call(&second, "GET", &format!("/session/{}/seed", id), None).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(before, after);
    assert_eq!(after["history"], json!(["2", "1"]));
    let fresh = create(&second, json!({"type": "A2"})).await;
    assert_ne!(fresh, id);
    std::fs::remove_dir_all(&dir).unwrap();
}
