//! Game service: an image gallery, description sessions in which an
//! instructor writes and aligns instructions, blind execution sessions,
//! QA fixes and rounds against machine executors.

pub mod api;
pub mod gallery;
pub mod protocol;
pub mod session;
pub mod store;

pub use api::{router, serve, spawn, Service, ServiceConfig};
pub use gallery::{Category, ImageTask};
pub use protocol::{machine_executor_round, Endpoint, ExecutorRequest, ExecutorResponse, RoundOptions, RoundOutcome};
