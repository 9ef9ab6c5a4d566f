//! The session API over a real socket.

use std::io::{Read, Write};
use std::net::{SocketAddr, TcpStream};
use std::sync::Arc;

use lpt_core::corpus::Corpus;
use lpt_core::service::{router, Api, Bounds};
use serde_json::{json, Value};

fn start() -> (SocketAddr, tokio::runtime::Runtime) {
    let rt = tokio::runtime::Runtime::new().unwrap();
    let listener = rt.block_on(tokio::net::TcpListener::bind("127.0.0.1:0")).unwrap();
    let addr = listener.local_addr().unwrap();
    let app = router(Arc::new(Api::new(Corpus::builtin(), Bounds::default())));
    rt.spawn(async move { axum::serve(listener, app).await.unwrap() });
    (addr, rt)
}

fn request(addr: SocketAddr, method: &str, path: &str, body: Option<Value>) -> (u16, Value) {
    let body = body.map(|b| b.to_string()).unwrap_or_default();
    let mut s = TcpStream::connect(addr).unwrap();
    write!(
        s,
        "{method} {path} HTTP/1.1\r\nHost: localhost\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    )
    .unwrap();
    let mut raw = String::new();
    s.read_to_string(&mut raw).unwrap();
    let (head, payload) = raw.split_once("\r\n\r\n").unwrap();
    let status = head.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!(head.to_ascii_lowercase().contains("content-type: application/json"), "{head}");
    (status, serde_json::from_str(payload).unwrap())
}

#[test]
fn session_lifecycle_over_http() {
    let (addr, _rt) = start();
    let (st, list) = request(addr, "GET", "/corpus", None);
    assert_eq!(st, 200);
    assert!(list.to_string().contains("naive_sort"));

    let (st, created) = request(addr, "POST", "/sessions", Some(json!({ "base": "naive_sort" })));
    assert_eq!(st, 201);
    let id = created["session"].as_str().unwrap().to_string();

    let steps = [
        json!({ "rule": "rename_predicate", "old": "sort/2", "new": "sort_TS/2" }),
        json!({ "rule": "unfold", "clause": "c1", "position": 0 }),
        json!({ "rule": "unfold", "clause": "c1.1", "position": 0 }),
    ];
    for (rev, step) in steps.iter().enumerate() {
        let (st, body) =
            request(addr, "POST", &format!("/sessions/{id}/apply"), Some(json!({ "revision": rev, "step": step, "verify_now": true })));
        assert_eq!(st, 200, "{body}");
        assert_eq!(body["history"].as_array().unwrap().last().unwrap()["diff"]["verdict"], "Equal");
    }

    let (st, cands) = request(addr, "GET", &format!("/sessions/{id}/clauses/c1.2/candidates"), None);
    assert_eq!(st, 200);
    assert_eq!(cands["candidates"][0]["fingerprint"], "ord1(Ls2)");

    let (st, _) = request(addr, "POST", &format!("/sessions/{id}/apply"), Some(json!({ "revision": 0, "step": steps[0] })));
    assert_eq!(st, 409);

    let (st, script) = request(addr, "GET", &format!("/sessions/{id}/script"), None);
    assert_eq!(st, 200);
    assert_eq!(script["steps"].as_array().unwrap().len(), 3);
}

#[test]
fn unknown_routes_and_bad_bodies() {
    let (addr, _rt) = start();
    assert_eq!(request(addr, "GET", "/nope", None).0, 404);
    assert_eq!(request(addr, "GET", "/sessions/missing", None).0, 404);
    assert_eq!(request(addr, "GET", "/corpus/missing", None).0, 404);
    assert_eq!(request(addr, "POST", "/sessions", Some(json!({ "wrong": 1 }))).0, 400);
}
