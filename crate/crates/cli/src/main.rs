//! `sdkx` — semidirect-product key exchange over non-commutative
//! (semi)groups: parameter generation, a two-party TCP demo, the
//! statistical indistinguishability experiments and desk-scale attack
//! oracles.

use std::fs;
use std::io::Write as _;
use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use sdkx_cli::exchange::{run_exchange, sha256, sha256_hex, EXIT_PROTOCOL, EXIT_VALIDATION};
use sdkx_cli::parse_big_decimal;
use sdkx_core::algebra::{GRMatrix, MATRIX_BITS};
use sdkx_core::attacks::{brute_force_exponent, detect_loop, toy_discrete_log, CSV_HEADER};
use sdkx_core::paramgen::{generate_matrix_params, sample_exponent, ParamFile, SecurityParams};
use sdkx_core::platforms::{
    is_prime_u64, matrix_closed_form, modpow_u64, toy_closed_form, ToyParams,
};
use sdkx_core::semidirect::{ProtocolSession, Role};
use sdkx_core::stats::{
    chi_square_distance, qq_data, run_experiment, slope_and_correlation, write_freq_csv,
    write_qq_csv, write_summary_csv, ExperimentConfig, ExperimentMode,
};

const TIMEOUT_ENV: &str = "SDKX_TIMEOUT_MS";
const DEFAULT_TIMEOUT_MS: u64 = 10_000;

#[derive(Parser)]
#[command(name = "sdkx", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a public parameter file (M, H, H⁻¹) and print its fingerprint
    Keygen {
        /// Security parameter: private exponents are drawn from [2^(t-1), 2^t)
        #[arg(long)]
        t: u16,
        /// Seed for reproducible generation; omit for an entropy-backed draw
        #[arg(long)]
        seed: Option<u64>,
        /// Number of triangular factors in H
        #[arg(long, default_value_t = 20)]
        factors: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Two-party key exchange over a stream socket
    Exchange {
        #[arg(long, value_enum)]
        role: CliRole,
        #[arg(long)]
        params: PathBuf,
        /// Address to listen on (responder), e.g. 127.0.0.1:0
        #[arg(long, conflicts_with = "connect")]
        listen: Option<String>,
        /// Address to connect to (initiator)
        #[arg(long)]
        connect: Option<String>,
        /// Seed for the private exponent; omit for an entropy-backed draw
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Frequency/Q-Q/chi-square experiments, emitted as CSV files
    Stats {
        #[arg(long, value_enum, default_value_t = StatsModeArg::Both)]
        mode: StatsModeArg,
        #[arg(long)]
        trials: Option<u32>,
        /// Lower exponent bound, e.g. 1e10
        #[arg(long, value_parser = parse_big_decimal)]
        exp_low: Option<BigUint>,
        /// Upper exponent bound (exclusive), e.g. 1e13
        #[arg(long, value_parser = parse_big_decimal)]
        exp_high: Option<BigUint>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Reuse one (M, H) draw for all trials instead of resampling
        #[arg(long)]
        fixed_params: bool,
        /// 500 trials with exponents in [1e44, 1e55)
        #[arg(long)]
        full_scale: bool,
        /// Output directory for the CSV files
        #[arg(long)]
        out: PathBuf,
    },
    /// Desk-scale attack oracles, reported as CSV
    Attack {
        #[arg(long, value_enum)]
        kind: AttackKind,
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        bound: u64,
        /// Planted exponent for the brute-force game (default: drawn from seed)
        #[arg(long)]
        m: Option<u64>,
        /// Run loop detection on the identity matrix instead of the file's M
        #[arg(long)]
        identity: bool,
        /// Toy modulus (toy-dlog)
        #[arg(long)]
        p: Option<u64>,
        /// Toy base (toy-dlog)
        #[arg(long)]
        g: Option<u64>,
        /// Planted discrete-log exponent (toy-dlog)
        #[arg(long)]
        exponent: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the CSV report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the Z_p* toy instantiation end-to-end in-process
    ToyDemo {
        #[arg(long, default_value_t = 1_000_003)]
        p: u64,
        #[arg(long, default_value_t = 5)]
        g: u64,
        #[arg(long, default_value_t = 3)]
        k: u64,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CliRole {
    Initiator,
    Responder,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StatsModeArg {
    PowerVsRandom,
    PowerVsSumpower,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum AttackKind {
    Brute,
    Loop,
    ToyDlog,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Keygen {
            t,
            seed,
            factors,
            out,
        } => cmd_keygen(t, seed, factors, &out),
        Command::Exchange {
            role,
            params,
            listen,
            connect,
            seed,
        } => cmd_exchange(role, &params, listen, connect, seed),
        Command::Stats {
            mode,
            trials,
            exp_low,
            exp_high,
            seed,
            fixed_params,
            full_scale,
            out,
        } => cmd_stats(
            mode,
            trials,
            exp_low,
            exp_high,
            seed,
            fixed_params,
            full_scale,
            &out,
        ),
        Command::Attack {
            kind,
            params,
            bound,
            m,
            identity,
            p,
            g,
            exponent,
            seed,
            out,
        } => cmd_attack(kind, params, bound, m, identity, p, g, exponent, seed, out),
        Command::ToyDemo {
            p,
            g,
            k,
            m,
            n,
            seed,
        } => cmd_toy_demo(p, g, k, m, n, seed),
    };
    ExitCode::from(code as u8)
}

fn rng_from(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    }
}

fn fail(code: i32, msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    code
}

fn cmd_keygen(t: u16, seed: Option<u64>, factors: usize, out: &Path) -> i32 {
    let sp = match SecurityParams::new(t, factors) {
        Ok(sp) => sp,
        Err(e) => return fail(EXIT_VALIDATION, e),
    };
    let mut rng = rng_from(seed);
    let generated = match generate_matrix_params(&mut rng, sp.factor_count) {
        Ok(g) => g,
        Err(e) => return fail(EXIT_VALIDATION, e),
    };
    let file = ParamFile {
        t: sp.t,
        params: generated.params,
    };
    let bytes = file.to_bytes();
    if let Err(e) = fs::write(out, &bytes) {
        return fail(EXIT_VALIDATION, format!("writing {}: {e}", out.display()));
    }
    println!(
        "wrote {} ({} bytes, t = {t}, {factors} factors)",
        out.display(),
        bytes.len()
    );
    println!("parameter fingerprint {}", sha256_hex(&bytes));
    println!("h resamples {}", generated.h_resamples);
    0
}

fn socket_timeout() -> Duration {
    let ms = std::env::var(TIMEOUT_ENV)
        .ok()
        .and_then(|v| v.parse::<u64>().ok())
        .unwrap_or(DEFAULT_TIMEOUT_MS);
    Duration::from_millis(ms)
}

fn cmd_exchange(
    role: CliRole,
    params_path: &Path,
    listen: Option<String>,
    connect: Option<String>,
    seed: Option<u64>,
) -> i32 {
    let bytes = match fs::read(params_path) {
        Ok(b) => b,
        Err(e) => {
            return fail(
                EXIT_VALIDATION,
                format!("reading {}: {e}", params_path.display()),
            )
        }
    };
    let fingerprint = sha256(&bytes);
    let file = match ParamFile::from_bytes(&bytes) {
        Ok(f) => f,
        Err(e) => return fail(EXIT_VALIDATION, format!("invalid parameter file: {e}")),
    };
    println!("parameter fingerprint {}", sha256_hex(&bytes));

    let mut rng = rng_from(seed);
    let exponent = sample_exponent(file.t, &mut rng);

    let (mut stream, role) = match role {
        CliRole::Responder => {
            let addr = match listen {
                Some(a) => a,
                None => return fail(EXIT_VALIDATION, "--role responder requires --listen"),
            };
            let listener = match TcpListener::bind(&addr) {
                Ok(l) => l,
                Err(e) => return fail(EXIT_PROTOCOL, format!("binding {addr}: {e}")),
            };
            match listener.local_addr() {
                Ok(local) => {
                    println!("listening on {local}");
                    let _ = std::io::stdout().flush();
                }
                Err(e) => return fail(EXIT_PROTOCOL, e),
            }
            match listener.accept() {
                Ok((stream, peer)) => {
                    println!("peer {peer}");
                    (stream, Role::Responder)
                }
                Err(e) => return fail(EXIT_PROTOCOL, format!("accept: {e}")),
            }
        }
        CliRole::Initiator => {
            let addr = match connect {
                Some(a) => a,
                None => return fail(EXIT_VALIDATION, "--role initiator requires --connect"),
            };
            match TcpStream::connect(&addr) {
                Ok(stream) => (stream, Role::Initiator),
                Err(e) => return fail(EXIT_PROTOCOL, format!("connecting to {addr}: {e}")),
            }
        }
    };
    let timeout = socket_timeout();
    let _ = stream.set_read_timeout(Some(timeout));
    let _ = stream.set_write_timeout(Some(timeout));

    match run_exchange(&mut stream, role, &file, &fingerprint, exponent) {
        Ok(outcome) => {
            println!("key fingerprint {}", outcome.key_fingerprint);
            println!("keys match");
            0
        }
        Err(e) => {
            let code = e.exit_code();
            fail(code, e)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_stats(
    mode: StatsModeArg,
    trials: Option<u32>,
    exp_low: Option<BigUint>,
    exp_high: Option<BigUint>,
    seed: u64,
    fixed_params: bool,
    full_scale: bool,
    out: &Path,
) -> i32 {
    if let Err(e) = fs::create_dir_all(out) {
        return fail(EXIT_VALIDATION, format!("creating {}: {e}", out.display()));
    }
    let modes: &[ExperimentMode] = match mode {
        StatsModeArg::PowerVsRandom => &[ExperimentMode::PowerVsRandom],
        StatsModeArg::PowerVsSumpower => &[ExperimentMode::PowerVsSumPower],
        StatsModeArg::Both => &[
            ExperimentMode::PowerVsRandom,
            ExperimentMode::PowerVsSumPower,
        ],
    };
    for &m in modes {
        let mut config = if full_scale {
            ExperimentConfig::full_scale(m, seed)
        } else {
            ExperimentConfig::desk_scale(m, seed)
        };
        if let Some(t) = trials {
            config.trials = t;
        }
        if let Some(lo) = &exp_low {
            config.exponent_low = lo.clone();
        }
        if let Some(hi) = &exp_high {
            config.exponent_high = hi.clone();
        }
        config.fixed_params = fixed_params;

        println!(
            "{}: {} trials, exponents in [{}, {})",
            m.label(),
            config.trials,
            config.exponent_low,
            config.exponent_high
        );
        let (a, b) = match run_experiment(&config) {
            Ok(tables) => tables,
            Err(e) => return fail(EXIT_VALIDATION, e),
        };
        let series = match qq_data(&a, &b) {
            Ok(s) => s,
            Err(e) => return fail(EXIT_VALIDATION, e),
        };
        let report = match chi_square_distance(&a, &b, 0.01) {
            Ok(r) => r,
            Err(e) => return fail(EXIT_VALIDATION, e),
        };

        let label = m.label();
        let mut buf = Vec::new();
        write_freq_csv(&mut buf, &a, &b, false).expect("vec write");
        if let Err(e) = fs::write(out.join(format!("{label}_freq.csv")), &buf) {
            return fail(EXIT_VALIDATION, e);
        }
        buf.clear();
        write_freq_csv(&mut buf, &a, &b, true).expect("vec write");
        if let Err(e) = fs::write(out.join(format!("{label}_freq_weighted.csv")), &buf) {
            return fail(EXIT_VALIDATION, e);
        }
        buf.clear();
        write_qq_csv(&mut buf, &series).expect("vec write");
        if let Err(e) = fs::write(out.join(format!("{label}_qq.csv")), &buf) {
            return fail(EXIT_VALIDATION, e);
        }
        buf.clear();
        write_summary_csv(&mut buf, &report, &series).expect("vec write");
        if let Err(e) = fs::write(out.join(format!("{label}_summary.csv")), &buf) {
            return fail(EXIT_VALIDATION, e);
        }

        let (mut min_slope, mut max_slope, mut min_corr) = (f64::MAX, f64::MIN, f64::MAX);
        for s in &series {
            let (slope, corr) = slope_and_correlation(&s.points);
            min_slope = min_slope.min(slope);
            max_slope = max_slope.max(slope);
            min_corr = min_corr.min(corr);
        }
        println!("  qq slope in [{min_slope:.4}, {max_slope:.4}], min corr {min_corr:.4}");
        println!(
            "  chi-square aggregate {:.2} (df {}, critical {:.2} at alpha {}) -> {}",
            report.aggregate_statistic,
            report.aggregate_df,
            report.aggregate_critical,
            report.alpha,
            if report.aggregate_rejected {
                "REJECTED"
            } else {
                "not rejected"
            }
        );
    }
    0
}

#[allow(clippy::too_many_arguments)]
fn cmd_attack(
    kind: AttackKind,
    params_path: Option<PathBuf>,
    bound: u64,
    planted_m: Option<u64>,
    identity: bool,
    p: Option<u64>,
    g: Option<u64>,
    exponent: Option<u64>,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> i32 {
    if bound == 0 {
        return fail(EXIT_VALIDATION, "--bound must be at least 1");
    }
    let load_params = |path: &Option<PathBuf>| -> Result<ParamFile, String> {
        let path = path.as_ref().ok_or("this attack kind requires --params")?;
        let bytes = fs::read(path).map_err(|e| format!("reading {}: {e}", path.display()))?;
        ParamFile::from_bytes(&bytes).map_err(|e| format!("invalid parameter file: {e}"))
    };
    let mut rng = rng_from(seed);

    let mut report = String::from(CSV_HEADER);
    report.push('\n');
    match kind {
        AttackKind::Brute => {
            let file = match load_params(&params_path) {
                Ok(f) => f,
                Err(e) => return fail(EXIT_VALIDATION, e),
            };
            let m = planted_m.unwrap_or_else(|| rng.gen_range(1..=bound));
            let target = matrix_closed_form(&file.params, &BigUint::from(m))
                .expect("planted exponent is positive");
            println!("planted m = {m}");
            let result = brute_force_exponent(&file.params, &target, bound);
            report.push_str(&result.csv_row("brute", MATRIX_BITS as u64, bound));
            report.push('\n');
        }
        AttackKind::Loop => {
            let matrix = if identity {
                GRMatrix::identity()
            } else {
                match load_params(&params_path) {
                    Ok(f) => f.params.m().clone(),
                    Err(e) => return fail(EXIT_VALIDATION, e),
                }
            };
            let result = detect_loop(&matrix, bound);
            report.push_str(&result.csv_row(MATRIX_BITS as u64, bound));
            report.push('\n');
        }
        AttackKind::ToyDlog => {
            let (p, g) = match (p, g) {
                (Some(p), Some(g)) => (p, g),
                _ => return fail(EXIT_VALIDATION, "toy-dlog requires --p and --g"),
            };
            if !is_prime_u64(p) {
                return fail(EXIT_VALIDATION, format!("{p} is not prime"));
            }
            if g <= 1 || g >= p {
                return fail(EXIT_VALIDATION, format!("base {g} is not a unit mod {p}"));
            }
            let e = exponent.unwrap_or_else(|| rng.gen_range(1..=bound));
            let target = modpow_u64(g, &BigUint::from(e), p);
            println!("planted exponent = {e}, target = {target}");
            let result = toy_discrete_log(g, target, p, bound);
            report.push_str(&result.csv_row("toy-dlog", 64 - p.leading_zeros() as u64, bound));
            report.push('\n');
        }
    }

    match out {
        Some(path) => {
            if let Err(e) = fs::write(&path, report.as_bytes()) {
                return fail(EXIT_VALIDATION, format!("writing {}: {e}", path.display()));
            }
            println!("wrote {}", path.display());
        }
        None => print!("{report}"),
    }
    0
}

fn cmd_toy_demo(p: u64, g: u64, k: u64, m: Option<u64>, n: Option<u64>, seed: Option<u64>) -> i32 {
    let params = match ToyParams::new(p, g, k) {
        Ok(params) => params,
        Err(e) => return fail(EXIT_VALIDATION, e),
    };
    let mut rng = rng_from(seed);
    let m = m.unwrap_or_else(|| rng.gen_range(1_000..1_000_000));
    let n = n.unwrap_or_else(|| rng.gen_range(1_000..1_000_000));
    println!(
        "platform Z_{p}^* with g = {g}, phi(x) = x^{k} ({})",
        if params.is_automorphism() {
            "automorphism"
        } else {
            "endomorphism only"
        }
    );
    println!("alice: m = {m}");
    println!("bob:   n = {n}");

    let mut alice = match ProtocolSession::new(Role::Initiator, &params, BigUint::from(m)) {
        Ok(s) => s,
        Err(e) => return fail(EXIT_VALIDATION, e),
    };
    let mut bob = match ProtocolSession::new(Role::Responder, &params, BigUint::from(n)) {
        Ok(s) => s,
        Err(e) => return fail(EXIT_VALIDATION, e),
    };
    let a = *alice.outbound();
    let b = *bob.outbound();
    println!("alice sends a = {a}");
    println!("bob   sends b = {b}");
    let k_alice = *alice.complete(&b);
    let k_bob = *bob.complete(&a);
    println!("alice derives K_A = phi^m(b) * a = {k_alice}");
    println!("bob   derives K_B = phi^n(a) * b = {k_bob}");
    let closed = toy_closed_form(&params, m + n).expect("m + n is positive");
    println!("closed form g^((k^(m+n)-1)/(k-1)) = {closed}");
    if k_alice == k_bob && k_alice == closed {
        println!("keys match");
        0
    } else {
        eprintln!("error: derivations disagree");
        sdkx_cli::exchange::EXIT_KEY_MISMATCH
    }
}
