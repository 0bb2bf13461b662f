//! The two-party exchange state machine. Both sides first compare
//! parameter-file fingerprints (the file itself travels out of band),
//! then swap their 540-byte transmissions, then confirm the derived key
//! by hash. The private exponent and the key itself never enter a
//! payload.

use std::io::{Read, Write};

use num_bigint::BigUint;
use sha2::{Digest, Sha256};
use thiserror::Error;

use sdkx_core::algebra::{GRMatrix, MATRIX_BYTES};
use sdkx_core::paramgen::ParamFile;
use sdkx_core::semidirect::{ProtocolSession, Role};

use crate::wire::{MsgType, WireError, WireMessage};

pub const FINGERPRINT_LEN: usize = 32;

/// Exit codes shared by the binary and the integration tests.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_PROTOCOL: i32 = 3;
pub const EXIT_KEY_MISMATCH: i32 = 4;

#[derive(Debug, Error)]
pub enum ExchangeError {
    #[error("parameter fingerprint mismatch: ours {ours}, peer {theirs}")]
    FingerprintMismatch { ours: String, theirs: String },
    #[error(transparent)]
    Wire(#[from] WireError),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("expected {expected:?}, peer sent {got:?}")]
    UnexpectedMessage { expected: MsgType, got: MsgType },
    #[error("{context}: payload of {got} bytes, expected {expected}")]
    MalformedPayload {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("received matrix failed validation: {0}")]
    BadMatrix(sdkx_core::Error),
    #[error("key confirmation mismatch")]
    ConfirmMismatch,
    #[error("session setup failed: {0}")]
    Session(sdkx_core::Error),
}

impl ExchangeError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ExchangeError::FingerprintMismatch { .. } => EXIT_VALIDATION,
            ExchangeError::ConfirmMismatch => EXIT_KEY_MISMATCH,
            ExchangeError::Session(_) => EXIT_VALIDATION,
            _ => EXIT_PROTOCOL,
        }
    }
}

#[derive(Debug)]
pub struct ExchangeOutcome {
    /// Hex SHA-256 of the serialized shared key.
    pub key_fingerprint: String,
}

pub fn sha256(bytes: &[u8]) -> [u8; FINGERPRINT_LEN] {
    Sha256::digest(bytes).into()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(sha256(bytes))
}

fn expect_message<S: Read>(
    stream: &mut S,
    expected: MsgType,
    payload_len: usize,
    context: &'static str,
) -> Result<Vec<u8>, ExchangeError> {
    let msg = WireMessage::read_from(stream)?;
    if msg.msg_type != expected {
        return Err(ExchangeError::UnexpectedMessage {
            expected,
            got: msg.msg_type,
        });
    }
    if msg.payload.len() != payload_len {
        return Err(ExchangeError::MalformedPayload {
            context,
            expected: payload_len,
            got: msg.payload.len(),
        });
    }
    Ok(msg.payload)
}

/// Drives one complete exchange over `stream`. `param_fingerprint` is
/// the SHA-256 of the parameter file bytes; the exponent is the caller's
/// private draw.
pub fn run_exchange<S: Read + Write>(
    stream: &mut S,
    role: Role,
    file: &ParamFile,
    param_fingerprint: &[u8; FINGERPRINT_LEN],
    exponent: BigUint,
) -> Result<ExchangeOutcome, ExchangeError> {
    // parameter agreement before any transmission
    WireMessage::new(MsgType::Params, param_fingerprint.to_vec()).write_to(stream)?;
    let theirs = expect_message(stream, MsgType::Params, FINGERPRINT_LEN, "PARAMS")?;
    if theirs != param_fingerprint {
        return Err(ExchangeError::FingerprintMismatch {
            ours: hex::encode(param_fingerprint),
            theirs: hex::encode(&theirs),
        });
    }

    let mut session =
        ProtocolSession::new(role, &file.params, exponent).map_err(ExchangeError::Session)?;
    let outbound = session.outbound().to_bytes().to_vec();

    let received = match role {
        Role::Initiator => {
            WireMessage::new(MsgType::Transmit, outbound).write_to(stream)?;
            expect_message(stream, MsgType::Transmit, MATRIX_BYTES, "TRANSMIT")?
        }
        Role::Responder => {
            let received = expect_message(stream, MsgType::Transmit, MATRIX_BYTES, "TRANSMIT")?;
            WireMessage::new(MsgType::Transmit, outbound).write_to(stream)?;
            received
        }
    };
    let received = GRMatrix::from_bytes(&received).map_err(ExchangeError::BadMatrix)?;

    let key = session.complete(&received);
    let confirm = sha256(&key.to_bytes());
    WireMessage::new(MsgType::Confirm, confirm.to_vec()).write_to(stream)?;
    let peer_confirm = expect_message(stream, MsgType::Confirm, FINGERPRINT_LEN, "CONFIRM")?;
    if peer_confirm != confirm {
        return Err(ExchangeError::ConfirmMismatch);
    }

    Ok(ExchangeOutcome {
        key_fingerprint: hex::encode(confirm),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use sdkx_core::paramgen::{generate_matrix_params, sample_exponent, DEFAULT_FACTOR_COUNT};

    /// In-memory duplex pipe built from two byte queues.
    struct Pipe {
        incoming: std::sync::mpsc::Receiver<u8>,
        outgoing: std::sync::mpsc::Sender<u8>,
    }

    fn pipe_pair() -> (Pipe, Pipe) {
        let (tx_a, rx_a) = std::sync::mpsc::channel();
        let (tx_b, rx_b) = std::sync::mpsc::channel();
        (
            Pipe {
                incoming: rx_a,
                outgoing: tx_b,
            },
            Pipe {
                incoming: rx_b,
                outgoing: tx_a,
            },
        )
    }

    impl Read for Pipe {
        fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
            let mut n = 0;
            while n < buf.len() {
                match self.incoming.recv() {
                    Ok(b) => {
                        buf[n] = b;
                        n += 1;
                    }
                    Err(_) => break,
                }
            }
            Ok(n)
        }
    }

    impl Write for Pipe {
        fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
            for &b in buf {
                self.outgoing
                    .send(b)
                    .map_err(|_| std::io::Error::new(std::io::ErrorKind::BrokenPipe, "closed"))?;
            }
            Ok(buf.len())
        }

        fn flush(&mut self) -> std::io::Result<()> {
            Ok(())
        }
    }

    #[test]
    fn exchange_agrees_over_in_memory_pipe() {
        let mut rng = ChaCha20Rng::seed_from_u64(400);
        let params = generate_matrix_params(&mut rng, DEFAULT_FACTOR_COUNT)
            .unwrap()
            .params;
        let file = ParamFile { t: 16, params };
        let fp = sha256(&file.to_bytes());
        let m = sample_exponent(16, &mut rng);
        let n = sample_exponent(16, &mut rng);

        let (mut a, mut b) = pipe_pair();
        let file_b = file.clone();
        let handle = std::thread::spawn(move || {
            run_exchange(&mut b, Role::Responder, &file_b, &fp, n).unwrap()
        });
        let alice = run_exchange(&mut a, Role::Initiator, &file, &fp, m).unwrap();
        let bob = handle.join().unwrap();
        assert_eq!(alice.key_fingerprint, bob.key_fingerprint);
    }

    #[test]
    fn neither_exponent_nor_key_bytes_cross_the_wire() {
        use std::sync::{Arc, Mutex};

        struct Tap<S> {
            inner: S,
            log: Arc<Mutex<Vec<u8>>>,
        }
        impl<S: Read> Read for Tap<S> {
            fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
                self.inner.read(buf)
            }
        }
        impl<S: Write> Write for Tap<S> {
            fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
                self.log.lock().unwrap().extend_from_slice(buf);
                self.inner.write(buf)
            }
            fn flush(&mut self) -> std::io::Result<()> {
                self.inner.flush()
            }
        }

        let mut rng = ChaCha20Rng::seed_from_u64(402);
        let params = generate_matrix_params(&mut rng, DEFAULT_FACTOR_COUNT)
            .unwrap()
            .params;
        let file = ParamFile { t: 64, params };
        let fp = sha256(&file.to_bytes());
        let m = sample_exponent(64, &mut rng);
        let n = sample_exponent(64, &mut rng);

        // reference run through the session API to learn K's serialization
        let mut alice = ProtocolSession::new(Role::Initiator, &file.params, m.clone()).unwrap();
        let bob = ProtocolSession::new(Role::Responder, &file.params, n.clone()).unwrap();
        let a_bytes = alice.outbound().to_bytes();
        let b_bytes = bob.outbound().to_bytes();
        let key_bytes = alice
            .complete(&GRMatrix::from_bytes(&b_bytes).unwrap())
            .to_bytes();

        let (pa, pb) = pipe_pair();
        let log = Arc::new(Mutex::new(Vec::new()));
        let mut tapped_a = Tap {
            inner: pa,
            log: log.clone(),
        };
        let mut tapped_b = Tap {
            inner: pb,
            log: log.clone(),
        };
        let file_b = file.clone();
        let n_wire = n.clone();
        let handle = std::thread::spawn(move || {
            run_exchange(&mut tapped_b, Role::Responder, &file_b, &fp, n_wire).unwrap()
        });
        run_exchange(&mut tapped_a, Role::Initiator, &file, &fp, m.clone()).unwrap();
        handle.join().unwrap();

        let wire = log.lock().unwrap().clone();
        let contains = |needle: &[u8]| wire.windows(needle.len()).any(|w| w == needle);
        // the public transmissions do cross the wire
        assert!(contains(&a_bytes));
        assert!(contains(&b_bytes));
        // the key and the private exponents never do
        assert!(!contains(&key_bytes), "serialized K leaked into a payload");
        assert!(!contains(&m.to_bytes_be()), "initiator exponent leaked");
        assert!(!contains(&n.to_bytes_be()), "responder exponent leaked");
    }

    #[test]
    fn fingerprint_mismatch_stops_before_transmit() {
        let mut rng = ChaCha20Rng::seed_from_u64(401);
        let params = generate_matrix_params(&mut rng, DEFAULT_FACTOR_COUNT)
            .unwrap()
            .params;
        let file = ParamFile { t: 8, params };
        let fp_a = sha256(&file.to_bytes());
        let mut fp_b = fp_a;
        fp_b[0] ^= 1;
        let m = sample_exponent(8, &mut rng);
        let n = sample_exponent(8, &mut rng);

        let (mut a, mut b) = pipe_pair();
        let file_b = file.clone();
        let handle =
            std::thread::spawn(move || run_exchange(&mut b, Role::Responder, &file_b, &fp_b, n));
        let alice = run_exchange(&mut a, Role::Initiator, &file, &fp_a, m);
        let bob = handle.join().unwrap();
        assert!(matches!(
            alice,
            Err(ExchangeError::FingerprintMismatch { .. })
        ));
        assert!(matches!(
            bob,
            Err(ExchangeError::FingerprintMismatch { .. })
        ));
        assert_eq!(alice.unwrap_err().exit_code(), EXIT_VALIDATION);
    }
}
