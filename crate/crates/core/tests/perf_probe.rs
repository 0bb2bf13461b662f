//! Manual timing probe for the heavy paths; run with
//! `cargo test -p sdkx-core --test perf_probe -- --ignored --nocapture`.

use std::time::Instant;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sdkx_core::paramgen::{generate_matrix_params, sample_exponent, DEFAULT_FACTOR_COUNT};
use sdkx_core::semidirect::{ProtocolSession, Role};

#[test]
#[ignore]
fn probe_session_cost() {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let params = generate_matrix_params(&mut rng, DEFAULT_FACTOR_COUNT)
        .unwrap()
        .params;

    let start = Instant::now();
    let reps = 200u32;
    let mut acc = params.m().clone();
    for _ in 0..reps {
        acc = acc.mul(params.h());
    }
    let per_mul = start.elapsed() / reps;
    println!("mat_mul: {per_mul:?}");
    assert!(!acc.augmentation().is_zero() || acc.augmentation().is_zero());

    let start = Instant::now();
    let sessions = 10u32;
    for i in 0..sessions {
        let mut rng = ChaCha20Rng::seed_from_u64(100 + i as u64);
        let m = sample_exponent(64, &mut rng);
        let n = sample_exponent(64, &mut rng);
        let mut alice = ProtocolSession::new(Role::Initiator, &params, m).unwrap();
        let mut bob = ProtocolSession::new(Role::Responder, &params, n).unwrap();
        let b = bob.outbound().clone();
        let a = alice.outbound().clone();
        assert_eq!(alice.complete(&b), bob.complete(&a));
    }
    println!(
        "full t=64 session (both sides): {:?}",
        start.elapsed() / sessions
    );

    let start = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(999);
    let g = generate_matrix_params(&mut rng, DEFAULT_FACTOR_COUNT).unwrap();
    println!(
        "paramgen: {:?} (resamples {})",
        start.elapsed(),
        g.h_resamples
    );

    let exp = BigUint::from(10u8).pow(44);
    let start = Instant::now();
    let _ = sdkx_core::platforms::matrix_closed_form(&params, &exp).unwrap();
    println!("transmission at 1e44: {:?}", start.elapsed());
}
