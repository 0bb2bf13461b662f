//! Acceptance for the wire demo: a two-process loopback exchange at
//! t = 64 with matching key fingerprints in bounded time, plus the
//! designated nonzero exits for tampered frames and mismatched
//! parameter files.

use std::io::{BufRead, BufReader};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Stdio};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use sdkx_cli::exchange::{sha256, sha256_hex};
use sdkx_cli::wire::{MsgType, WireMessage};
use sdkx_core::paramgen::{sample_exponent, ParamFile};
use sdkx_core::semidirect::{derive_shared, Platform};

const BIN: &str = env!("CARGO_BIN_EXE_sdkx");

fn keygen(dir: &Path, name: &str, t: u16, seed: u64) -> PathBuf {
    let path = dir.join(name);
    let output = Command::new(BIN)
        .args([
            "keygen",
            "--t",
            &t.to_string(),
            "--seed",
            &seed.to_string(),
            "--out",
        ])
        .arg(&path)
        .output()
        .expect("spawn keygen");
    assert!(output.status.success());
    path
}

struct Collected {
    code: i32,
    stdout: String,
}

/// Waits for the child with a hard deadline so a hung process fails the
/// test instead of wedging it.
fn wait_collect(mut child: Child, deadline: Duration) -> Collected {
    let stdout = child.stdout.take().expect("piped stdout");
    let reader = std::thread::spawn(move || {
        let mut out = String::new();
        for line in BufReader::new(stdout).lines() {
            match line {
                Ok(l) => {
                    out.push_str(&l);
                    out.push('\n');
                }
                Err(_) => break,
            }
        }
        out
    });
    let started = Instant::now();
    let code = loop {
        match child.try_wait().expect("try_wait") {
            Some(status) => break status.code().unwrap_or(-1),
            None if started.elapsed() > deadline => {
                let _ = child.kill();
                let _ = child.wait();
                panic!("process exceeded {deadline:?}");
            }
            None => std::thread::sleep(Duration::from_millis(20)),
        }
    };
    Collected {
        code,
        stdout: reader.join().expect("reader thread"),
    }
}

fn grab_line<'a>(output: &'a str, prefix: &str) -> Option<&'a str> {
    output.lines().find_map(|l| l.strip_prefix(prefix))
}

fn spawn_exchange(params: &Path, extra: &[&str]) -> Child {
    Command::new(BIN)
        .args(["exchange", "--params"])
        .arg(params)
        .args(extra)
        .env("SDKX_TIMEOUT_MS", "8000")
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .expect("spawn exchange")
}

/// Reads responder stdout until the listening line appears, returning
/// the bound address and the already-consumed output.
fn read_listening_addr(child: &mut Child) -> (String, String) {
    let stdout = child.stdout.as_mut().expect("piped stdout");
    let mut reader = BufReader::new(stdout);
    let mut consumed = String::new();
    let deadline = Instant::now() + Duration::from_secs(10);
    loop {
        assert!(
            Instant::now() < deadline,
            "responder never printed its address"
        );
        let mut line = String::new();
        let n = reader.read_line(&mut line).expect("read responder stdout");
        assert!(n > 0, "responder stdout closed early: {consumed}");
        consumed.push_str(&line);
        if let Some(addr) = line.trim().strip_prefix("listening on ") {
            return (addr.to_string(), consumed);
        }
    }
}

#[test]
fn criterion_8_wire_demo() {
    let dir = tempfile::tempdir().unwrap();
    let params = keygen(dir.path(), "params.sdkx", 64, 42);

    // happy path: loopback exchange at t = 64 under 10 seconds
    let started = Instant::now();
    let mut responder = spawn_exchange(
        &params,
        &[
            "--role",
            "responder",
            "--listen",
            "127.0.0.1:0",
            "--seed",
            "1",
        ],
    );
    let (addr, consumed) = read_listening_addr(&mut responder);
    let initiator = spawn_exchange(
        &params,
        &["--role", "initiator", "--connect", &addr, "--seed", "2"],
    );
    let initiator = wait_collect(initiator, Duration::from_secs(15));
    let responder = wait_collect(responder, Duration::from_secs(15));
    let elapsed = started.elapsed();

    assert_eq!(initiator.code, 0, "initiator output:\n{}", initiator.stdout);
    assert_eq!(responder.code, 0, "responder output:\n{}", responder.stdout);
    let fp_i = grab_line(&initiator.stdout, "key fingerprint ").expect("initiator fingerprint");
    let responder_all = format!("{consumed}{}", responder.stdout);
    let fp_r = grab_line(&responder_all, "key fingerprint ").expect("responder fingerprint");
    assert_eq!(fp_i, fp_r, "key fingerprints differ");
    assert!(initiator.stdout.contains("keys match"));
    assert!(
        elapsed < Duration::from_secs(10),
        "exchange took {elapsed:?}, budget is 10 s"
    );

    // in-process oracle: replaying the seeded exponent draws and
    // deriving the key directly must reproduce the printed fingerprint
    let file = ParamFile::from_bytes(&std::fs::read(&params).unwrap()).unwrap();
    let mut responder_rng = ChaCha20Rng::seed_from_u64(1);
    let n = sample_exponent(file.t, &mut responder_rng);
    let mut initiator_rng = ChaCha20Rng::seed_from_u64(2);
    let m = sample_exponent(file.t, &mut initiator_rng);
    let a = file.params.transmission(&m).unwrap();
    let b = file.params.transmission(&n).unwrap();
    let key = derive_shared(&file.params, &b, &m, &a);
    assert_eq!(derive_shared(&file.params, &a, &n, &b), key);
    assert_eq!(fp_i, sha256_hex(&key.to_bytes()), "wire run diverged from direct derivation");

    // mismatched parameter files: fingerprint guard fires on both sides
    // with exit code 2 before any transmission
    let other = keygen(dir.path(), "other.sdkx", 64, 43);
    let mut responder = spawn_exchange(
        &params,
        &[
            "--role",
            "responder",
            "--listen",
            "127.0.0.1:0",
            "--seed",
            "3",
        ],
    );
    let (addr, _) = read_listening_addr(&mut responder);
    let initiator = spawn_exchange(
        &other,
        &["--role", "initiator", "--connect", &addr, "--seed", "4"],
    );
    let initiator = wait_collect(initiator, Duration::from_secs(15));
    let responder = wait_collect(responder, Duration::from_secs(15));
    assert_eq!(initiator.code, 2, "initiator output:\n{}", initiator.stdout);
    assert_eq!(responder.code, 2, "responder output:\n{}", responder.stdout);

    // tampered frame: a fake responder answers the PARAMS handshake
    // honestly, then replies to the 540-byte TRANSMIT with a frame whose
    // payload length is wrong -> protocol error exit
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap().to_string();
    let file_bytes = std::fs::read(&params).unwrap();
    let fingerprint = sha256(&file_bytes);
    let fake = std::thread::spawn(move || {
        let (mut stream, _) = listener.accept().unwrap();
        let msg = WireMessage::read_from(&mut stream).unwrap();
        assert_eq!(msg.msg_type, MsgType::Params);
        WireMessage::new(MsgType::Params, fingerprint.to_vec())
            .write_to(&mut stream)
            .unwrap();
        let msg = WireMessage::read_from(&mut stream).unwrap();
        assert_eq!(msg.msg_type, MsgType::Transmit);
        assert_eq!(msg.payload.len(), 540);
        WireMessage::new(MsgType::Transmit, vec![0u8; 100])
            .write_to(&mut stream)
            .unwrap();
        // hold the socket open until the peer gives up on its own
        let _ = WireMessage::read_from(&mut stream);
    });
    let initiator = spawn_exchange(
        &params,
        &["--role", "initiator", "--connect", &addr, "--seed", "5"],
    );
    let initiator = wait_collect(initiator, Duration::from_secs(15));
    fake.join().unwrap();
    assert_eq!(initiator.code, 3, "initiator output:\n{}", initiator.stdout);

    println!(
        "PASS criterion 8: loopback exchange at t = 64 in {elapsed:.1?} with matching \
         fingerprints; mismatched params exit 2; tampered frame exits 3"
    );
}
