use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::http::{header, Method, StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use axum::Router;

use super::Api;

/// Every request is routed by [`Api::handle`]; rule application and
/// verification run on the blocking pool.
pub fn router(api: Arc<Api>) -> Router {
    Router::new().fallback(move |method: Method, uri: Uri, body: Bytes| {
        let api = api.clone();
        async move {
            let body = String::from_utf8_lossy(&body).into_owned();
            let path = uri.path().to_string();
            let r = tokio::task::spawn_blocking(move || api.handle(method.as_str(), &path, &body)).await;
            match r {
                Ok(r) => {
                    let status = StatusCode::from_u16(r.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
                    (status, [(header::CONTENT_TYPE, "application/json")], r.body.to_string()).into_response()
                }
                Err(e) => Response::builder()
                    .status(StatusCode::INTERNAL_SERVER_ERROR)
                    .body(e.to_string().into())
                    .expect("static response"),
            }
        }
    })
}

/// Serves the API on 127.0.0.1 until the process is stopped.
pub fn serve(api: Api, port: u16) -> std::io::Result<()> {
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async move {
        let addr = SocketAddr::from(([127, 0, 0, 1], port));
        let listener = tokio::net::TcpListener::bind(addr).await?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        axum::serve(listener, router(Arc::new(api))).await
    })
}
