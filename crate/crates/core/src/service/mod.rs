//! Command-line dispatch and the HTTP session server.

mod api;
mod cli;
mod http;

use serde::{Deserialize, Serialize};

pub use api::{Api, ApiResponse};
pub use cli::{dispatch, CommandResult};
pub use http::{router, serve};

use crate::engine::SolveLimits;

/// Enumeration bounds shared by verification commands and routes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub domain: Vec<i64>,
    pub max_list_len: usize,
    pub limits: SolveLimits,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { domain: vec![0, 1, 2], max_list_len: 3, limits: SolveLimits::default() }
    }
}
