//! Wire-protocol adapter for an out-of-process annotation parser.
//!
//! The protocol is newline-delimited JSON over any byte stream (subprocess
//! stdio or a TCP connection):
//!
//! ```text
//! request:  {"id": "r1", "category": "GD&Ts", "text": "<transcription>"}
//!           {"id": "r2", "category": "Measures", "image": "<base64 PNG>"}
//! response: {"id": "r1", "record": {"GD&Ts": [{...}]}}
//!           {"id": "r2", "error": "<message>"}
//! ```
//!
//! Responses may arrive out of order; the client correlates them by id.
//! Every returned record is validated against the request category before it
//! is accepted — model output that fails the schema is rejected with
//! `SchemaViolation`, never passed through.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::process::{Child, Command, Stdio};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::schema::{
    parse_document, validate_record, AnnotationCategory, AnnotationRecord, SchemaError,
};

pub const DEFAULT_ADAPTER_TIMEOUT: Duration = Duration::from_secs(30);

/// One parsing request. Exactly one payload variant is present.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseRequest {
    pub request_id: String,
    pub category: AnnotationCategory,
    pub payload: ParsePayload,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParsePayload {
    /// Text transcription of the patch.
    Text(String),
    /// Raw PNG bytes; base64-encoded on the wire.
    ImagePng(Vec<u8>),
}

/// A validated adapter response.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseResult {
    pub request_id: String,
    pub record: AnnotationRecord,
}

#[derive(Debug, Error)]
pub enum AdapterError {
    #[error("adapter unavailable: {0}")]
    Unavailable(String),
    #[error("adapter timed out after {0:?}")]
    Timeout(Duration),
    #[error("adapter returned a schema-violating record: {0}")]
    SchemaViolation(SchemaError),
    #[error("adapter reported an error for request {request_id}: {message}")]
    Remote { request_id: String, message: String },
    #[error("protocol error: {0}")]
    Protocol(String),
}

/// Byte-stream transport carrying one JSON line per message.
pub trait AdapterTransport {
    fn send_line(&mut self, line: &str) -> Result<(), AdapterError>;
    fn recv_line(&mut self) -> Result<String, AdapterError>;
}

#[derive(Serialize)]
struct WireRequest<'a> {
    id: &'a str,
    category: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    text: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    image: Option<String>,
}

#[derive(Deserialize)]
struct WireResponse {
    id: String,
    #[serde(default)]
    record: Option<serde_json::Value>,
    #[serde(default)]
    error: Option<String>,
}

/// Client over any transport. Supports pipelined requests; responses are
/// correlated by request id and may arrive in any order.
pub struct AdapterClient<T: AdapterTransport> {
    transport: T,
    pending: HashMap<String, WireResponse>,
}

impl<T: AdapterTransport> AdapterClient<T> {
    pub fn new(transport: T) -> Self {
        AdapterClient {
            transport,
            pending: HashMap::new(),
        }
    }

    /// Send one request line without waiting for the response.
    pub fn submit(&mut self, request: &ParseRequest) -> Result<(), AdapterError> {
        let (text, image) = match &request.payload {
            ParsePayload::Text(t) => (Some(t.as_str()), None),
            ParsePayload::ImagePng(bytes) => (None, Some(base64_encode(bytes))),
        };
        let wire = WireRequest {
            id: &request.request_id,
            category: request.category.display_name(),
            text,
            image,
        };
        let line = serde_json::to_string(&wire)
            .map_err(|e| AdapterError::Protocol(e.to_string()))?;
        self.transport.send_line(&line)
    }

    /// Read responses until the one matching `request` arrives, then validate
    /// its record against the request category.
    pub fn collect(&mut self, request: &ParseRequest) -> Result<ParseResult, AdapterError> {
        let response = loop {
            if let Some(r) = self.pending.remove(&request.request_id) {
                break r;
            }
            let line = self.transport.recv_line()?;
            let parsed: WireResponse = serde_json::from_str(&line)
                .map_err(|e| AdapterError::Protocol(format!("bad response line: {e}")))?;
            if parsed.id == request.request_id {
                break parsed;
            }
            self.pending.insert(parsed.id.clone(), parsed);
        };

        if let Some(message) = response.error {
            return Err(AdapterError::Remote {
                request_id: request.request_id.clone(),
                message,
            });
        }
        let value = response
            .record
            .ok_or_else(|| AdapterError::Protocol("response carries neither record nor error".into()))?;
        validate_response_record(request.category, &value)
            .map(|record| ParseResult {
                request_id: request.request_id.clone(),
                record,
            })
            .map_err(AdapterError::SchemaViolation)
    }
}

/// Round-trip one request through an adapter endpoint.
pub fn adapter_parse<T: AdapterTransport>(
    request: &ParseRequest,
    client: &mut AdapterClient<T>,
) -> Result<ParseResult, AdapterError> {
    client.submit(request)?;
    client.collect(request)
}

/// Decode and schema-check a patch-dialect record value returned by the
/// adapter. This is the hallucination gate: anything that does not validate
/// against the requested category is rejected.
fn validate_response_record(
    category: AnnotationCategory,
    value: &serde_json::Value,
) -> Result<AnnotationRecord, SchemaError> {
    let text = serde_json::to_string(value).map_err(|e| SchemaError::MalformedJson(e.to_string()))?;
    let document = parse_document(&text)?;
    let mut records = document.into_records();
    let record = match records.len() {
        1 => records.remove(0),
        n => {
            return Err(SchemaError::violation(
                "record",
                format!("expected a single-category record, got {n} categories"),
            ))
        }
    };
    validate_record(category, &record)?;
    Ok(record)
}

// ---------------------------------------------------------------------------
// Transports

/// TCP transport; `recv_line` honors a read timeout.
pub struct TcpTransport {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
    timeout: Duration,
}

impl TcpTransport {
    pub fn connect(addr: impl ToSocketAddrs, timeout: Duration) -> Result<Self, AdapterError> {
        let addr = addr
            .to_socket_addrs()
            .map_err(|e| AdapterError::Unavailable(e.to_string()))?
            .next()
            .ok_or_else(|| AdapterError::Unavailable("endpoint resolved to no address".into()))?;
        let stream = TcpStream::connect_timeout(&addr, timeout)
            .map_err(|e| AdapterError::Unavailable(e.to_string()))?;
        stream
            .set_read_timeout(Some(timeout))
            .map_err(|e| AdapterError::Unavailable(e.to_string()))?;
        let reader = BufReader::new(
            stream
                .try_clone()
                .map_err(|e| AdapterError::Unavailable(e.to_string()))?,
        );
        Ok(TcpTransport {
            reader,
            writer: stream,
            timeout,
        })
    }
}

impl AdapterTransport for TcpTransport {
    fn send_line(&mut self, line: &str) -> Result<(), AdapterError> {
        self.writer
            .write_all(line.as_bytes())
            .and_then(|_| self.writer.write_all(b"\n"))
            .map_err(|e| AdapterError::Unavailable(e.to_string()))
    }

    fn recv_line(&mut self) -> Result<String, AdapterError> {
        let mut line = String::new();
        match self.reader.read_line(&mut line) {
            Ok(0) => Err(AdapterError::Unavailable("adapter closed the connection".into())),
            Ok(_) => Ok(line.trim_end_matches(['\r', '\n']).to_string()),
            Err(e)
                if e.kind() == std::io::ErrorKind::WouldBlock
                    || e.kind() == std::io::ErrorKind::TimedOut =>
            {
                Err(AdapterError::Timeout(self.timeout))
            }
            Err(e) => Err(AdapterError::Unavailable(e.to_string())),
        }
    }
}

/// Subprocess transport over the child's stdin/stdout. Reads happen on a
/// helper thread so `recv_line` can time out.
pub struct SubprocessTransport {
    child: Child,
    stdin: std::process::ChildStdin,
    lines: std::sync::mpsc::Receiver<std::io::Result<String>>,
    timeout: Duration,
}

impl SubprocessTransport {
    pub fn spawn(command: &str, timeout: Duration) -> Result<Self, AdapterError> {
        let mut parts = command.split_whitespace();
        let program = parts
            .next()
            .ok_or_else(|| AdapterError::Unavailable("empty adapter command".into()))?;
        let mut child = Command::new(program)
            .args(parts)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| AdapterError::Unavailable(format!("{command}: {e}")))?;
        let stdin = child
            .stdin
            .take()
            .ok_or_else(|| AdapterError::Unavailable("no stdin pipe".into()))?;
        let stdout = child
            .stdout
            .take()
            .ok_or_else(|| AdapterError::Unavailable("no stdout pipe".into()))?;
        let (tx, rx) = std::sync::mpsc::channel();
        std::thread::spawn(move || {
            let reader = BufReader::new(stdout);
            for line in reader.lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(SubprocessTransport {
            child,
            stdin,
            lines: rx,
            timeout,
        })
    }
}

impl AdapterTransport for SubprocessTransport {
    fn send_line(&mut self, line: &str) -> Result<(), AdapterError> {
        self.stdin
            .write_all(line.as_bytes())
            .and_then(|_| self.stdin.write_all(b"\n"))
            .and_then(|_| self.stdin.flush())
            .map_err(|e| AdapterError::Unavailable(e.to_string()))
    }

    fn recv_line(&mut self) -> Result<String, AdapterError> {
        match self.lines.recv_timeout(self.timeout) {
            Ok(Ok(line)) => Ok(line),
            Ok(Err(e)) => Err(AdapterError::Unavailable(e.to_string())),
            Err(std::sync::mpsc::RecvTimeoutError::Timeout) => {
                Err(AdapterError::Timeout(self.timeout))
            }
            Err(std::sync::mpsc::RecvTimeoutError::Disconnected) => {
                Err(AdapterError::Unavailable("adapter process exited".into()))
            }
        }
    }
}

impl Drop for SubprocessTransport {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Standard base64 (RFC 4648, with padding). Small enough to keep inline
/// rather than pulling a crate for one call site.
pub(crate) fn base64_encode(bytes: &[u8]) -> String {
    const TABLE: &[u8; 64] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    let mut out = String::with_capacity(bytes.len().div_ceil(3) * 4);
    for chunk in bytes.chunks(3) {
        let b = [chunk[0], *chunk.get(1).unwrap_or(&0), *chunk.get(2).unwrap_or(&0)];
        let n = (u32::from(b[0]) << 16) | (u32::from(b[1]) << 8) | u32::from(b[2]);
        out.push(TABLE[(n >> 18) as usize & 63] as char);
        out.push(TABLE[(n >> 12) as usize & 63] as char);
        out.push(if chunk.len() > 1 {
            TABLE[(n >> 6) as usize & 63] as char
        } else {
            '='
        });
        out.push(if chunk.len() > 2 {
            TABLE[n as usize & 63] as char
        } else {
            '='
        });
    }
    out
}
