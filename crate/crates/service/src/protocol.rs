//! Machine-executor wire protocol.
//!
//! A request carries the board the executor starts from, the instruction
//! and the previous instruction; the reply carries the executor's actions.
//! Both are single JSON objects, either one per line over a TCP stream
//! (`tcp://host:port`) or as the body of a `POST` to an HTTP URL.
//!
//! ```text
//! -> {"board":["WWWW...", ...],"instruction":"paint the 2nd tile red","prev_instruction":null,"round_id":"r1","step":1}
//! <- {"actions":[[2,1,"red"]]}
//! ```
//!
//! `round_id` and `step` are optional; they let stateful executors tell
//! rounds apart when each request arrives on its own HTTP exchange.

use axum::extract::State;
use axum::routing::post;
use axum::{Json, Router};
use hexagons_core::dataset::DrawingProcedure;
use hexagons_core::hexboard::{ActionSet, Board};
use hexagons_core::metrics::{evaluate_procedure, hypothesis_boards, ProcedureReport, StepEvaluation};
use hexagons_core::naive::{predict, ParserState};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};
use std::time::Duration;
use tokio::io::{AsyncBufReadExt, AsyncWriteExt, BufReader};
use tokio::net::tcp::{OwnedReadHalf, OwnedWriteHalf};
use tokio::net::{TcpListener, TcpStream};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutorRequest {
    pub board: Board,
    pub instruction: String,
    pub prev_instruction: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub round_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutorResponse {
    pub actions: ActionSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Endpoint {
    Tcp(String),
    Http(String),
}

impl FromStr for Endpoint {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(addr) = s.strip_prefix("tcp://") {
            Ok(Endpoint::Tcp(addr.to_string()))
        } else if s.starts_with("http://") {
            Ok(Endpoint::Http(s.to_string()))
        } else {
            Err(format!(
                "unsupported executor endpoint `{s}`; use tcp://host:port or http://..."
            ))
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Tcp(addr) => write!(f, "tcp://{addr}"),
            Endpoint::Http(url) => f.write_str(url),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProtocolError {
    #[error("cannot reach executor: {0}")]
    Connect(String),
    #[error("executor did not answer within {0:?}")]
    Timeout(Duration),
    #[error("executor closed the connection")]
    Closed,
    #[error("malformed executor reply: {0}")]
    Malformed(String),
    #[error("executor returned HTTP {0}")]
    Status(u16),
    #[error("transport error: {0}")]
    Io(String),
}

enum Transport {
    Tcp {
        reader: BufReader<OwnedReadHalf>,
        writer: OwnedWriteHalf,
    },
    Http {
        client: reqwest::Client,
        url: String,
    },
}

/// One connection to an executor, kept open for a whole round.
pub struct ExecutorClient {
    transport: Transport,
    timeout: Duration,
}

impl ExecutorClient {
    pub async fn connect(endpoint: &Endpoint, timeout: Duration) -> Result<ExecutorClient, ProtocolError> {
        let transport = match endpoint {
            Endpoint::Tcp(addr) => {
                let stream = tokio::time::timeout(timeout, TcpStream::connect(addr))
                    .await
                    .map_err(|_| ProtocolError::Timeout(timeout))?
                    .map_err(|e| ProtocolError::Connect(e.to_string()))?;
                let (read, writer) = stream.into_split();
                Transport::Tcp {
                    reader: BufReader::new(read),
                    writer,
                }
            }
            Endpoint::Http(url) => Transport::Http {
                client: reqwest::Client::builder()
                    .timeout(timeout)
                    .build()
                    .map_err(|e| ProtocolError::Connect(e.to_string()))?,
                url: url.clone(),
            },
        };
        Ok(ExecutorClient { transport, timeout })
    }

    pub async fn execute(&mut self, request: &ExecutorRequest) -> Result<ActionSet, ProtocolError> {
        let timeout = self.timeout;
        match &mut self.transport {
            Transport::Tcp { reader, writer } => {
                let mut line = serde_json::to_string(request).expect("request serializes");
                line.push('\n');
                let exchange = async {
                    writer.write_all(line.as_bytes()).await?;
                    let mut reply = String::new();
                    reader.read_line(&mut reply).await?;
                    Ok::<_, std::io::Error>(reply)
                };
                let reply = tokio::time::timeout(timeout, exchange)
                    .await
                    .map_err(|_| ProtocolError::Timeout(timeout))?
                    .map_err(|e| ProtocolError::Io(e.to_string()))?;
                if reply.is_empty() {
                    return Err(ProtocolError::Closed);
                }
                parse_reply(&reply)
            }
            Transport::Http { client, url } => {
                let response = client.post(url.as_str()).json(request).send().await.map_err(|e| {
                    if e.is_timeout() {
                        ProtocolError::Timeout(timeout)
                    } else if e.is_connect() {
                        ProtocolError::Connect(e.to_string())
                    } else {
                        ProtocolError::Io(e.to_string())
                    }
                })?;
                if !response.status().is_success() {
                    return Err(ProtocolError::Status(response.status().as_u16()));
                }
                let body = response.text().await.map_err(|e| ProtocolError::Io(e.to_string()))?;
                parse_reply(&body)
            }
        }
    }
}

fn parse_reply(text: &str) -> Result<ActionSet, ProtocolError> {
    serde_json::from_str::<ExecutorResponse>(text.trim())
        .map(|r| r.actions)
        .map_err(|e| ProtocolError::Malformed(e.to_string()))
}

#[derive(Debug, Clone)]
pub struct RoundOptions {
    pub oracle_prev_state: bool,
    pub timeout: Duration,
    pub round_id: String,
}

/// The result of playing one procedure against a machine executor. When the
/// round breaks off, `report` is absent and only the steps that were
/// actually answered are scored.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundOutcome {
    pub complete: bool,
    pub steps_completed: usize,
    pub predictions: Vec<ActionSet>,
    pub partial_steps: Vec<StepEvaluation>,
    pub report: Option<ProcedureReport>,
    pub error: Option<String>,
}

pub async fn machine_executor_round(
    procedure: &DrawingProcedure,
    endpoint: &Endpoint,
    options: &RoundOptions,
) -> RoundOutcome {
    let mut predictions = Vec::with_capacity(procedure.steps.len());
    let error = play(procedure, endpoint, options, &mut predictions).await.err();
    if let Some(e) = &error {
        log::warn!("round {} against {endpoint} stopped: {e}", options.round_id);
    }
    let complete = error.is_none();
    let report = if complete {
        Some(evaluate_procedure(procedure, &predictions, options.oracle_prev_state).expect("one prediction per step"))
    } else {
        None
    };
    let partial_steps = if complete {
        Vec::new()
    } else {
        let boards = hypothesis_boards(procedure, &predictions, options.oracle_prev_state);
        procedure
            .steps
            .iter()
            .zip(&predictions)
            .zip(&boards)
            .map(|((gold, hyp), board)| StepEvaluation::compare(&gold.actions, &gold.board_after, hyp, board))
            .collect()
    };
    RoundOutcome {
        complete,
        steps_completed: predictions.len(),
        predictions,
        partial_steps,
        report,
        error: error.map(|e| e.to_string()),
    }
}

async fn play(
    procedure: &DrawingProcedure,
    endpoint: &Endpoint,
    options: &RoundOptions,
    predictions: &mut Vec<ActionSet>,
) -> Result<(), ProtocolError> {
    let mut client = ExecutorClient::connect(endpoint, options.timeout).await?;
    let mut rolling = Board::new();
    for (i, step) in procedure.steps.iter().enumerate() {
        let board = if options.oracle_prev_state {
            procedure.board_before(step.index)
        } else {
            rolling.clone()
        };
        let request = ExecutorRequest {
            board,
            instruction: step.instruction.clone(),
            prev_instruction: (i > 0).then(|| procedure.steps[i - 1].instruction.clone()),
            round_id: Some(options.round_id.clone()),
            step: Some(step.index),
        };
        let actions = client.execute(&request).await?;
        rolling = rolling.apply_actions(&actions);
        predictions.push(actions);
    }
    Ok(())
}

/// Serves executors over NDJSON; `make` builds a fresh executor for each
/// connection, so per-round state lives as long as the connection.
pub async fn serve_tcp_executor<F, E>(listener: TcpListener, make: F)
where
    F: Fn() -> E + Send + Sync + 'static,
    E: FnMut(&ExecutorRequest) -> ActionSet + Send + 'static,
{
    let make = Arc::new(make);
    loop {
        let (stream, peer) = match listener.accept().await {
            Ok(conn) => conn,
            Err(e) => {
                log::warn!("accept failed: {e}");
                continue;
            }
        };
        let mut executor = make();
        tokio::spawn(async move {
            let (read, mut write) = stream.into_split();
            let mut lines = BufReader::new(read).lines();
            while let Ok(Some(line)) = lines.next_line().await {
                let reply = match serde_json::from_str::<ExecutorRequest>(&line) {
                    Ok(request) => serde_json::to_string(&ExecutorResponse {
                        actions: executor(&request),
                    }),
                    Err(e) => {
                        log::warn!("bad request from {peer}: {e}");
                        break;
                    }
                };
                let mut reply = reply.expect("response serializes");
                reply.push('\n');
                if write.write_all(reply.as_bytes()).await.is_err() {
                    break;
                }
            }
        });
    }
}

/// The rule-based baseline as a connection-scoped executor.
pub fn naive_executor() -> impl FnMut(&ExecutorRequest) -> ActionSet + Send {
    let mut state = ParserState::default();
    move |request| predict(&request.instruction, &mut state)
}

pub async fn serve_naive_tcp(listener: TcpListener) {
    serve_tcp_executor(listener, naive_executor).await
}

type RoundStates = Arc<Mutex<HashMap<String, ParserState>>>;

/// The baseline over HTTP at `POST /execute`. Carry-over state is kept per
/// `round_id` and reset at step 1; requests without a round id start fresh.
pub fn naive_http_router() -> Router {
    async fn execute(
        State(rounds): State<RoundStates>,
        Json(request): Json<ExecutorRequest>,
    ) -> Json<ExecutorResponse> {
        let mut rounds = rounds.lock().expect("round state lock");
        let actions = match &request.round_id {
            Some(id) => {
                let state = rounds.entry(id.clone()).or_default();
                if request.step == Some(1) {
                    *state = ParserState::default();
                }
                predict(&request.instruction, state)
            }
            None => predict(&request.instruction, &mut ParserState::default()),
        };
        Json(ExecutorResponse { actions })
    }
    Router::new()
        .route("/execute", post(execute))
        .with_state(RoundStates::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_parsing() {
        assert_eq!(
            "tcp://127.0.0.1:9000".parse(),
            Ok(Endpoint::Tcp("127.0.0.1:9000".into()))
        );
        assert_eq!(
            "http://localhost:8080/execute".parse(),
            Ok(Endpoint::Http("http://localhost:8080/execute".into()))
        );
        assert!("ftp://x".parse::<Endpoint>().is_err());
    }

    #[test]
    fn request_wire_format() {
        let request = ExecutorRequest {
            board: Board::new(),
            instruction: "paint".into(),
            prev_instruction: None,
            round_id: None,
            step: None,
        };
        let json = serde_json::to_value(&request).unwrap();
        assert_eq!(json["board"].as_array().unwrap().len(), 10);
        assert_eq!(json["board"][0], "W".repeat(18));
        assert!(json["prev_instruction"].is_null());
        assert!(json.get("round_id").is_none());
    }

    #[test]
    fn malformed_replies_are_rejected() {
        assert!(parse_reply(r#"{"actions":[[1,1,"red"]]}"#).is_ok());
        assert!(matches!(
            parse_reply(r#"{"actions":[[19,1,"red"]]}"#),
            Err(ProtocolError::Malformed(_))
        ));
        assert!(matches!(
            parse_reply(r#"{"actions":[[1,1,"red"],[1,1,"blue"]]}"#),
            Err(ProtocolError::Malformed(_))
        ));
        assert!(matches!(parse_reply("nonsense"), Err(ProtocolError::Malformed(_))));
    }
}
