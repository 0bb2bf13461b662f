//! Length-prefixed binary framing for the two-party demo.
//!
//! Frame layout: magic "SDKX" (4) · version (1) · msg_type (1) ·
//! payload_len (4, big-endian) · payload. Unknown types, foreign magic,
//! wrong versions and oversized frames are rejected at this layer;
//! per-type payload shapes are checked by the exchange state machine.

use std::io::{self, Read, Write};

use thiserror::Error;

pub const MAGIC: [u8; 4] = *b"SDKX";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 10;
/// Largest legitimate payload is a 540-byte matrix; anything bigger is a
/// framing violation.
pub const MAX_PAYLOAD: u32 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum MsgType {
    Params = 1,
    Transmit = 2,
    Confirm = 3,
}

impl TryFrom<u8> for MsgType {
    type Error = WireError;

    fn try_from(value: u8) -> Result<Self, WireError> {
        match value {
            1 => Ok(MsgType::Params),
            2 => Ok(MsgType::Transmit),
            3 => Ok(MsgType::Confirm),
            other => Err(WireError::UnknownType(other)),
        }
    }
}

#[derive(Debug, Error)]
pub enum WireError {
    #[error("i/o failure: {0}")]
    Io(#[from] io::Error),
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported wire version {0}")]
    BadVersion(u8),
    #[error("unknown message type {0}")]
    UnknownType(u8),
    #[error("payload of {0} bytes exceeds the {MAX_PAYLOAD}-byte cap")]
    Oversized(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WireMessage {
    pub msg_type: MsgType,
    pub payload: Vec<u8>,
}

impl WireMessage {
    pub fn new(msg_type: MsgType, payload: Vec<u8>) -> Self {
        WireMessage { msg_type, payload }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.payload.len());
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.push(self.msg_type as u8);
        out.extend_from_slice(&(self.payload.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(&self.encode())?;
        w.flush()
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self, WireError> {
        let mut header = [0u8; HEADER_LEN];
        r.read_exact(&mut header)?;
        if header[..4] != MAGIC {
            return Err(WireError::BadMagic);
        }
        if header[4] != VERSION {
            return Err(WireError::BadVersion(header[4]));
        }
        let msg_type = MsgType::try_from(header[5])?;
        let len = u32::from_be_bytes([header[6], header[7], header[8], header[9]]);
        if len > MAX_PAYLOAD {
            return Err(WireError::Oversized(len));
        }
        let mut payload = vec![0u8; len as usize];
        r.read_exact(&mut payload)?;
        Ok(WireMessage { msg_type, payload })
    }
}
