//! The wire format: how model weights and protocol messages become bytes.
//!
//! All integers are little-endian. Parameter values travel as IEEE-754
//! `f32`, which halves payload size relative to the in-memory `f64`
//! representation; [`quantize_to_wire`] applies the same rounding without a
//! round trip so senders can know exactly what receivers will decode.
//!
//! Weight payload layout:
//!
//! ```text
//! magic "GFL1" | version u8 | layer count u16 |
//!   per layer: name len u8 | name bytes | rank u8 | dims u32 each | values f32 each
//! ```
//!
//! Message layout:
//!
//! ```text
//! kind u8 | round u32 | sender u32 | payload len u32 | payload bytes
//! ```

use gfl_core::seed::fnv1a;
use gfl_core::{ModelWeights, Tensor};

use crate::{TransportError, WireResult};

pub const WIRE_MAGIC: [u8; 4] = *b"GFL1";
pub const WIRE_VERSION: u8 = 1;

/// Hard ceiling on any payload or frame, to stop a corrupt or hostile
/// length field from driving allocation.
pub const MAX_FRAME_BYTES: usize = 64 * 1024 * 1024;

/// Protocol message kinds. The discriminants are the wire encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum MessageKind {
    /// A node announces itself. Control-plane, no payload.
    Hello = 0,
    /// Initial global model pushed to every node before round 1.
    InitModel = 1,
    /// A client's locally trained weights, sent to the server.
    ClientUpdate = 2,
    /// The aggregated global model broadcast for a round.
    GlobalModel = 3,
    /// A node's locally trained weights, gossiped to a mesh neighbor.
    NeighborUpdate = 4,
    /// Shutdown signal. Control-plane, no payload.
    Release = 5,
}

impl MessageKind {
    pub fn from_byte(b: u8) -> WireResult<Self> {
        Ok(match b {
            0 => MessageKind::Hello,
            1 => MessageKind::InitModel,
            2 => MessageKind::ClientUpdate,
            3 => MessageKind::GlobalModel,
            4 => MessageKind::NeighborUpdate,
            5 => MessageKind::Release,
            other => return Err(TransportError::BadKind { value: other }),
        })
    }

    /// Control messages carry no payload and cost no link latency in the
    /// simulator; everything else carries a weight payload.
    pub fn is_control(self) -> bool {
        matches!(self, MessageKind::Hello | MessageKind::Release)
    }
}

/// One protocol message. Construction enforces the kind/payload contract:
/// control kinds are empty, model kinds carry an encoded weight set.
#[derive(Debug, Clone, PartialEq)]
pub struct WireMessage {
    kind: MessageKind,
    round: u32,
    sender: u32,
    payload: Vec<u8>,
}

impl WireMessage {
    /// Build a control message (`Hello` or `Release`).
    pub fn control(kind: MessageKind, round: u32, sender: u32) -> WireResult<Self> {
        if !kind.is_control() {
            return Err(TransportError::PayloadMismatch {
                kind,
                detail: "model-bearing kind built without weights".into(),
            });
        }
        Ok(WireMessage {
            kind,
            round,
            sender,
            payload: Vec::new(),
        })
    }

    /// Build a model-bearing message around an encoded weight set.
    pub fn model(
        kind: MessageKind,
        round: u32,
        sender: u32,
        weights: &ModelWeights,
    ) -> WireResult<Self> {
        if kind.is_control() {
            return Err(TransportError::PayloadMismatch {
                kind,
                detail: "control kind cannot carry weights".into(),
            });
        }
        Ok(WireMessage {
            kind,
            round,
            sender,
            payload: encode_weights(weights)?,
        })
    }

    pub fn kind(&self) -> MessageKind {
        self.kind
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn sender(&self) -> u32 {
        self.sender
    }

    pub fn payload(&self) -> &[u8] {
        &self.payload
    }

    /// FNV-1a of the payload, for traces and logs.
    pub fn payload_hash(&self) -> u64 {
        fnv1a(&self.payload)
    }

    /// Decode the payload back into weights. Control messages are a usage
    /// error.
    pub fn decode_payload(&self) -> WireResult<ModelWeights> {
        if self.kind.is_control() {
            return Err(TransportError::PayloadMismatch {
                kind: self.kind,
                detail: "control message has no weights to decode".into(),
            });
        }
        decode_weights(&self.payload)
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(13 + self.payload.len());
        out.push(self.kind as u8);
        out.extend_from_slice(&self.round.to_le_bytes());
        out.extend_from_slice(&self.sender.to_le_bytes());
        out.extend_from_slice(&(self.payload.len() as u32).to_le_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn decode(bytes: &[u8]) -> WireResult<Self> {
        let mut r = Reader::new(bytes);
        let kind = MessageKind::from_byte(r.u8()?)?;
        let round = r.u32()?;
        let sender = r.u32()?;
        let len = r.u32()? as usize;
        if len > MAX_FRAME_BYTES {
            return Err(TransportError::TooLarge {
                bytes: len,
                limit: MAX_FRAME_BYTES,
            });
        }
        let payload = r.take(len)?.to_vec();
        r.finish()?;
        if kind.is_control() && !payload.is_empty() {
            return Err(TransportError::PayloadMismatch {
                kind,
                detail: format!("control message carries {} payload bytes", payload.len()),
            });
        }
        if !kind.is_control() && payload.is_empty() {
            return Err(TransportError::PayloadMismatch {
                kind,
                detail: "model-bearing message has an empty payload".into(),
            });
        }
        Ok(WireMessage {
            kind,
            round,
            sender,
            payload,
        })
    }
}

/// Serialize weights. Fails on non-finite values, layer names over 255
/// bytes, tensors of rank over 255, or more than 65535 layers; within those
/// bounds the encoding is total and canonical (same weights, same bytes).
pub fn encode_weights(weights: &ModelWeights) -> WireResult<Vec<u8>> {
    if weights.len() > usize::from(u16::MAX) {
        return Err(TransportError::Encode(format!(
            "{} layers exceed the u16 layer count",
            weights.len()
        )));
    }
    let mut out = Vec::new();
    out.extend_from_slice(&WIRE_MAGIC);
    out.push(WIRE_VERSION);
    out.extend_from_slice(&(weights.len() as u16).to_le_bytes());
    for (name, tensor) in weights.iter() {
        let name_bytes = name.as_bytes();
        if name_bytes.len() > 255 {
            return Err(TransportError::Encode(format!(
                "layer name '{name}' exceeds 255 bytes"
            )));
        }
        if tensor.rank() > 255 {
            return Err(TransportError::Encode(format!(
                "layer '{name}' rank {} exceeds 255",
                tensor.rank()
            )));
        }
        out.push(name_bytes.len() as u8);
        out.extend_from_slice(name_bytes);
        out.push(tensor.rank() as u8);
        for &dim in tensor.shape() {
            if dim > u32::MAX as usize {
                return Err(TransportError::Encode(format!(
                    "layer '{name}' dimension {dim} exceeds u32"
                )));
            }
            out.extend_from_slice(&(dim as u32).to_le_bytes());
        }
        for &v in tensor.data() {
            if !v.is_finite() {
                return Err(TransportError::Encode(format!(
                    "layer '{name}' holds a non-finite value"
                )));
            }
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
        if out.len() > MAX_FRAME_BYTES {
            return Err(TransportError::TooLarge {
                bytes: out.len(),
                limit: MAX_FRAME_BYTES,
            });
        }
    }
    Ok(out)
}

/// Deserialize weights. Errors carry the byte offset at which decoding
/// stopped making sense.
pub fn decode_weights(bytes: &[u8]) -> WireResult<ModelWeights> {
    if bytes.len() > MAX_FRAME_BYTES {
        return Err(TransportError::TooLarge {
            bytes: bytes.len(),
            limit: MAX_FRAME_BYTES,
        });
    }
    let mut r = Reader::new(bytes);
    let magic = r.take(4)?;
    if magic != WIRE_MAGIC {
        return Err(TransportError::Decode {
            offset: 0,
            detail: format!("bad magic {magic:02x?}, expected {WIRE_MAGIC:02x?}"),
        });
    }
    let version = r.u8()?;
    if version != WIRE_VERSION {
        return Err(TransportError::Decode {
            offset: 4,
            detail: format!("unsupported version {version}, expected {WIRE_VERSION}"),
        });
    }
    let layer_count = r.u16()?;
    let mut weights = ModelWeights::new();
    for _ in 0..layer_count {
        let name_offset = r.offset;
        let name_len = usize::from(r.u8()?);
        let name = std::str::from_utf8(r.take(name_len)?)
            .map_err(|_| TransportError::Decode {
                offset: name_offset,
                detail: "layer name is not UTF-8".into(),
            })?
            .to_string();
        let rank = usize::from(r.u8()?);
        let mut shape = Vec::with_capacity(rank);
        for _ in 0..rank {
            let dim_offset = r.offset;
            let dim = r.u32()? as usize;
            shape.push(dim);
            let elems: usize = shape.iter().product();
            if elems.saturating_mul(4) > MAX_FRAME_BYTES {
                return Err(TransportError::Decode {
                    offset: dim_offset,
                    detail: format!("layer '{name}' claims an oversized shape {shape:?}"),
                });
            }
        }
        let elems: usize = shape.iter().product();
        let mut data = Vec::with_capacity(elems);
        for _ in 0..elems {
            data.push(f64::from(r.f32()?));
        }
        let offset = r.offset;
        let tensor = Tensor::from_parts(shape, data).map_err(|e| TransportError::Decode {
            offset,
            detail: e.to_string(),
        })?;
        weights.push(name, tensor).map_err(|e| TransportError::Decode {
            offset: name_offset,
            detail: e.to_string(),
        })?;
    }
    r.finish()?;
    Ok(weights)
}

/// The exact rounding the wire applies: every `f64` parameter through `f32`
/// and back. `decode(encode(w)) == quantize_to_wire(w)` for all encodable
/// weights, which lets a sender compute the receiver's view locally.
pub fn quantize_to_wire(weights: &ModelWeights) -> ModelWeights {
    weights.map(|v| f64::from(v as f32))
}

/// FNV-1a of the canonical encoding; stable fingerprint for logs.
pub fn weights_hash(weights: &ModelWeights) -> WireResult<u64> {
    Ok(fnv1a(&encode_weights(weights)?))
}

/// Bounded little-endian reader that tracks its offset for error reporting.
struct Reader<'a> {
    bytes: &'a [u8],
    offset: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Reader { bytes, offset: 0 }
    }

    fn take(&mut self, n: usize) -> WireResult<&'a [u8]> {
        if self.offset + n > self.bytes.len() {
            return Err(TransportError::Decode {
                offset: self.offset,
                detail: format!(
                    "needed {n} bytes, only {} remain",
                    self.bytes.len() - self.offset
                ),
            });
        }
        let slice = &self.bytes[self.offset..self.offset + n];
        self.offset += n;
        Ok(slice)
    }

    fn u8(&mut self) -> WireResult<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> WireResult<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> WireResult<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f32(&mut self) -> WireResult<f32> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    /// Error if any input remains unconsumed.
    fn finish(&self) -> WireResult<()> {
        if self.offset != self.bytes.len() {
            return Err(TransportError::Decode {
                offset: self.offset,
                detail: format!("{} trailing bytes", self.bytes.len() - self.offset),
            });
        }
        Ok(())
    }
}
