//! Bit-exact codec for the polling protocol spoken between PLC and clients.
//!
//! The profile keeps the familiar 8-byte TCP-transport header of industrial
//! read/write protocols — a 3-character message type, an `F` chunk marker and
//! a little-endian u32 total length — and carries a minimal typed read/write
//! service layer on top:
//!
//! ```text
//! header:      0..3 ASCII type (HEL|ACK|MSG|CLO)   3 'F'   4..8 u32 LE size
//! HEL payload: 8 security mode (0x00 = None)
//! MSG payload: 8 service   9..13 u32 LE handle   13..15 u16 LE count
//!              then per node: u16 LE id
//!              and, for responses and writes, u8 tag + value
//!              (tag 0x00 = bool, 1 byte; tag 0x01 = f32, 4 bytes LE)
//! services:    0x01 ReadRequest  0x02 ReadResponse
//!              0x03 WriteRequest 0x04 WriteResponse
//! ```
//!
//! `size` always equals `8 + payload length`. Decoding arbitrary bytes never
//! panics; every malformed input maps to a precise [`DecodeError`].

use std::fmt;

use thiserror::Error;

/// Minimum encoded frame: just the header.
pub const HEADER_LEN: usize = 8;
/// Security mode byte carried in HEL: no signing, no encryption.
pub const SECURITY_MODE_NONE: u8 = 0x00;

/// A process variable address. Any u16 decodes; only the twelve assigned
/// ids are *known* and carry a declared value type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u16);

impl NodeId {
    pub const B101_LEVEL: NodeId = NodeId(101);
    pub const B102_FLOW: NodeId = NodeId(102);
    pub const B103_PRESSURE: NodeId = NodeId(103);
    pub const B104_TEMP: NodeId = NodeId(104);
    pub const S111_LOW_LIMIT: NodeId = NodeId(111);
    pub const S112_HIGH_LIMIT: NodeId = NodeId(112);
    pub const B113_LOWER: NodeId = NodeId(113);
    pub const B114_UPPER: NodeId = NodeId(114);
    pub const M101_PUMP: NodeId = NodeId(201);
    pub const M102_VALVE: NodeId = NodeId(202);
    pub const LOW_THRESHOLD: NodeId = NodeId(301);
    pub const HIGH_THRESHOLD: NodeId = NodeId(302);

    /// Every assigned node id, ascending.
    pub const ALL: [NodeId; 12] = [
        NodeId::B101_LEVEL,
        NodeId::B102_FLOW,
        NodeId::B103_PRESSURE,
        NodeId::B104_TEMP,
        NodeId::S111_LOW_LIMIT,
        NodeId::S112_HIGH_LIMIT,
        NodeId::B113_LOWER,
        NodeId::B114_UPPER,
        NodeId::M101_PUMP,
        NodeId::M102_VALVE,
        NodeId::LOW_THRESHOLD,
        NodeId::HIGH_THRESHOLD,
    ];

    pub fn is_known(self) -> bool {
        NodeId::ALL.contains(&self)
    }

    /// Declared value type for known ids; `None` for unassigned ids.
    pub fn value_kind(self) -> Option<ValueKind> {
        match self {
            NodeId::B101_LEVEL
            | NodeId::B102_FLOW
            | NodeId::B103_PRESSURE
            | NodeId::B104_TEMP
            | NodeId::LOW_THRESHOLD
            | NodeId::HIGH_THRESHOLD => Some(ValueKind::Float),
            NodeId::S111_LOW_LIMIT
            | NodeId::S112_HIGH_LIMIT
            | NodeId::B113_LOWER
            | NodeId::B114_UPPER
            | NodeId::M101_PUMP
            | NodeId::M102_VALVE => Some(ValueKind::Bool),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NodeId::B101_LEVEL => "B101",
            NodeId::B102_FLOW => "B102",
            NodeId::B103_PRESSURE => "B103",
            NodeId::B104_TEMP => "B104",
            NodeId::S111_LOW_LIMIT => "S111",
            NodeId::S112_HIGH_LIMIT => "S112",
            NodeId::B113_LOWER => "B113",
            NodeId::B114_UPPER => "B114",
            NodeId::M101_PUMP => "M101",
            NodeId::M102_VALVE => "M102",
            NodeId::LOW_THRESHOLD => "LOW_THRESHOLD",
            NodeId::HIGH_THRESHOLD => "HIGH_THRESHOLD",
            _ => "?",
        }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_known() {
            write!(f, "{}", self.name())
        } else {
            write!(f, "node#{}", self.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueKind {
    Bool,
    Float,
}

/// A typed node value as carried on the wire.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeValue {
    Bool(bool),
    Float(f32),
}

impl NodeValue {
    pub fn kind(self) -> ValueKind {
        match self {
            NodeValue::Bool(_) => ValueKind::Bool,
            NodeValue::Float(_) => ValueKind::Float,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            NodeValue::Bool(b) => {
                if b {
                    1.0
                } else {
                    0.0
                }
            }
            NodeValue::Float(v) => v as f64,
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            NodeValue::Bool(b) => Some(b),
            NodeValue::Float(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsgType {
    Hel,
    Ack,
    Msg,
    Clo,
}

impl MsgType {
    pub fn code(self) -> &'static [u8; 3] {
        match self {
            MsgType::Hel => b"HEL",
            MsgType::Ack => b"ACK",
            MsgType::Msg => b"MSG",
            MsgType::Clo => b"CLO",
        }
    }

    fn from_code(code: &[u8]) -> Option<Self> {
        match code {
            b"HEL" => Some(MsgType::Hel),
            b"ACK" => Some(MsgType::Ack),
            b"MSG" => Some(MsgType::Msg),
            b"CLO" => Some(MsgType::Clo),
            _ => None,
        }
    }
}

/// Service body of a MSG frame.
#[derive(Debug, Clone, PartialEq)]
pub enum Service {
    ReadRequest {
        handle: u32,
        nodes: Vec<NodeId>,
    },
    ReadResponse {
        handle: u32,
        values: Vec<(NodeId, NodeValue)>,
    },
    WriteRequest {
        handle: u32,
        writes: Vec<(NodeId, NodeValue)>,
    },
    WriteResponse {
        handle: u32,
        applied: Vec<(NodeId, NodeValue)>,
    },
}

impl Service {
    pub fn handle(&self) -> u32 {
        match self {
            Service::ReadRequest { handle, .. }
            | Service::ReadResponse { handle, .. }
            | Service::WriteRequest { handle, .. }
            | Service::WriteResponse { handle, .. } => *handle,
        }
    }

    fn code(&self) -> u8 {
        match self {
            Service::ReadRequest { .. } => 0x01,
            Service::ReadResponse { .. } => 0x02,
            Service::WriteRequest { .. } => 0x03,
            Service::WriteResponse { .. } => 0x04,
        }
    }
}

/// One application-layer message.
#[derive(Debug, Clone, PartialEq)]
pub enum Frame {
    /// HEL, ACK or CLO with an uninterpreted payload. The canonical HEL body
    /// is a single security-mode byte; empty bodies are accepted.
    Control { msg_type: MsgType, payload: Vec<u8> },
    /// MSG carrying a service body.
    Message(Service),
}

impl Frame {
    pub fn hello() -> Frame {
        Frame::Control {
            msg_type: MsgType::Hel,
            payload: vec![SECURITY_MODE_NONE],
        }
    }

    pub fn ack() -> Frame {
        Frame::Control {
            msg_type: MsgType::Ack,
            payload: Vec::new(),
        }
    }

    pub fn close() -> Frame {
        Frame::Control {
            msg_type: MsgType::Clo,
            payload: Vec::new(),
        }
    }

    pub fn msg_type(&self) -> MsgType {
        match self {
            Frame::Control { msg_type, .. } => *msg_type,
            Frame::Message(_) => MsgType::Msg,
        }
    }

    pub fn service(&self) -> Option<&Service> {
        match self {
            Frame::Message(s) => Some(s),
            Frame::Control { .. } => None,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum EncodeError {
    #[error("payload of {0} bytes exceeds the u32 frame size field")]
    PayloadTooLarge(usize),
    #[error("node list must not be empty")]
    EmptyNodeList,
    #[error("value for {node} must be {expected:?}")]
    TypeMismatch { node: NodeId, expected: ValueKind },
}

#[derive(Debug, Error, PartialEq)]
pub enum DecodeError {
    #[error("short buffer: {0} bytes, need at least {1}")]
    ShortBuffer(usize, usize),
    #[error("bad magic: message type or chunk byte unrecognised")]
    BadMagic,
    #[error("size field says {stated} but buffer holds {actual}")]
    SizeMismatch { stated: u32, actual: usize },
    #[error("unknown service code {0:#04x}")]
    UnknownService(u8),
    #[error("service body truncated")]
    Truncated,
    #[error("unknown value tag {0:#04x}")]
    BadTag(u8),
    #[error("{0} trailing bytes after service body")]
    TrailingBytes(usize),
}

fn encode_entries(buf: &mut Vec<u8>, entries: &[(NodeId, NodeValue)]) {
    buf.extend_from_slice(&(entries.len() as u16).to_le_bytes());
    for (node, value) in entries {
        buf.extend_from_slice(&node.0.to_le_bytes());
        match value {
            NodeValue::Bool(b) => {
                buf.push(0x00);
                buf.push(u8::from(*b));
            }
            NodeValue::Float(v) => {
                buf.push(0x01);
                buf.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
}

/// Serializes a frame to its exact wire bytes.
pub fn encode_frame(frame: &Frame) -> Result<Vec<u8>, EncodeError> {
    let payload = match frame {
        Frame::Control { payload, .. } => payload.clone(),
        Frame::Message(service) => {
            let mut body = vec![service.code()];
            body.extend_from_slice(&service.handle().to_le_bytes());
            match service {
                Service::ReadRequest { nodes, .. } => {
                    body.extend_from_slice(&(nodes.len() as u16).to_le_bytes());
                    for node in nodes {
                        body.extend_from_slice(&node.0.to_le_bytes());
                    }
                }
                Service::ReadResponse { values, .. } => encode_entries(&mut body, values),
                Service::WriteRequest { writes, .. } => encode_entries(&mut body, writes),
                Service::WriteResponse { applied, .. } => encode_entries(&mut body, applied),
            }
            body
        }
    };
    let total = HEADER_LEN as u64 + payload.len() as u64;
    if total > u32::MAX as u64 {
        return Err(EncodeError::PayloadTooLarge(payload.len()));
    }
    let mut out = Vec::with_capacity(total as usize);
    out.extend_from_slice(frame.msg_type().code());
    out.push(b'F');
    out.extend_from_slice(&(total as u32).to_le_bytes());
    out.extend_from_slice(&payload);
    Ok(out)
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], DecodeError> {
        if self.pos + n > self.data.len() {
            return Err(DecodeError::Truncated);
        }
        let slice = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u8(&mut self) -> Result<u8, DecodeError> {
        Ok(self.take(1)?[0])
    }

    fn u16le(&mut self) -> Result<u16, DecodeError> {
        let b = self.take(2)?;
        Ok(u16::from_le_bytes([b[0], b[1]]))
    }

    fn u32le(&mut self) -> Result<u32, DecodeError> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn value(&mut self) -> Result<NodeValue, DecodeError> {
        match self.u8()? {
            0x00 => Ok(NodeValue::Bool(self.u8()? != 0)),
            0x01 => {
                let b = self.take(4)?;
                Ok(NodeValue::Float(f32::from_le_bytes([b[0], b[1], b[2], b[3]])))
            }
            tag => Err(DecodeError::BadTag(tag)),
        }
    }
}

/// Parses one frame from a buffer holding exactly one frame.
pub fn decode_frame(bytes: &[u8]) -> Result<Frame, DecodeError> {
    if bytes.len() < HEADER_LEN {
        return Err(DecodeError::ShortBuffer(bytes.len(), HEADER_LEN));
    }
    let msg_type = MsgType::from_code(&bytes[0..3]).ok_or(DecodeError::BadMagic)?;
    if bytes[3] != b'F' {
        return Err(DecodeError::BadMagic);
    }
    let stated = u32::from_le_bytes([bytes[4], bytes[5], bytes[6], bytes[7]]);
    if stated as usize != bytes.len() {
        return Err(DecodeError::SizeMismatch {
            stated,
            actual: bytes.len(),
        });
    }
    let payload = &bytes[HEADER_LEN..];
    match msg_type {
        MsgType::Hel | MsgType::Ack | MsgType::Clo => Ok(Frame::Control {
            msg_type,
            payload: payload.to_vec(),
        }),
        MsgType::Msg => {
            let mut cur = Cursor {
                data: payload,
                pos: 0,
            };
            let code = cur.u8()?;
            let handle = cur.u32le()?;
            let count = cur.u16le()? as usize;
            let service = match code {
                0x01 => {
                    let mut nodes = Vec::with_capacity(count);
                    for _ in 0..count {
                        nodes.push(NodeId(cur.u16le()?));
                    }
                    Service::ReadRequest { handle, nodes }
                }
                0x02 | 0x03 | 0x04 => {
                    let mut entries = Vec::with_capacity(count);
                    for _ in 0..count {
                        let node = NodeId(cur.u16le()?);
                        entries.push((node, cur.value()?));
                    }
                    match code {
                        0x02 => Service::ReadResponse {
                            handle,
                            values: entries,
                        },
                        0x03 => Service::WriteRequest {
                            handle,
                            writes: entries,
                        },
                        _ => Service::WriteResponse {
                            handle,
                            applied: entries,
                        },
                    }
                }
                other => return Err(DecodeError::UnknownService(other)),
            };
            if cur.pos != payload.len() {
                return Err(DecodeError::TrailingBytes(payload.len() - cur.pos));
            }
            Ok(Frame::Message(service))
        }
    }
}

fn check_typed(entries: &[(NodeId, NodeValue)]) -> Result<(), EncodeError> {
    if entries.is_empty() {
        return Err(EncodeError::EmptyNodeList);
    }
    for (node, value) in entries {
        if let Some(expected) = node.value_kind() {
            if expected != value.kind() {
                return Err(EncodeError::TypeMismatch {
                    node: *node,
                    expected,
                });
            }
        }
    }
    Ok(())
}

/// Builds a read request; node ids are sorted ascending.
pub fn build_read_request(nodes: &[NodeId], handle: u32) -> Result<Frame, EncodeError> {
    if nodes.is_empty() {
        return Err(EncodeError::EmptyNodeList);
    }
    let mut nodes = nodes.to_vec();
    nodes.sort();
    Ok(Frame::Message(Service::ReadRequest { handle, nodes }))
}

pub fn build_read_response(
    handle: u32,
    values: &[(NodeId, NodeValue)],
) -> Result<Frame, EncodeError> {
    check_typed(values)?;
    Ok(Frame::Message(Service::ReadResponse {
        handle,
        values: values.to_vec(),
    }))
}

pub fn build_write_request(
    handle: u32,
    writes: &[(NodeId, NodeValue)],
) -> Result<Frame, EncodeError> {
    check_typed(writes)?;
    Ok(Frame::Message(Service::WriteRequest {
        handle,
        writes: writes.to_vec(),
    }))
}

pub fn build_write_response(
    handle: u32,
    applied: &[(NodeId, NodeValue)],
) -> Result<Frame, EncodeError> {
    check_typed(applied)?;
    Ok(Frame::Message(Service::WriteResponse {
        handle,
        applied: applied.to_vec(),
    }))
}

/// Checks that every known node in a decoded service carries its declared
/// value type. Unknown ids pass (they are decodable but flagged elsewhere).
pub fn validate_service_types(service: &Service) -> Result<(), EncodeError> {
    let entries = match service {
        Service::ReadRequest { .. } => return Ok(()),
        Service::ReadResponse { values, .. } => values,
        Service::WriteRequest { writes, .. } => writes,
        Service::WriteResponse { applied, .. } => applied,
    };
    for (node, value) in entries {
        if let Some(expected) = node.value_kind() {
            if expected != value.kind() {
                return Err(EncodeError::TypeMismatch {
                    node: *node,
                    expected,
                });
            }
        }
    }
    Ok(())
}
