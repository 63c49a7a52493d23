use nlg_core::certifier::{certify_eof, error_params, prop32_ledger, CertInput};

fn chsh_alpha() -> f64 {
    (2.0 + 2f64.sqrt()) / 4.0 - 0.75
}

#[test]
fn input_and_sampling_errors_small_for_small_s_at_the_gate() {
    let alpha = chsh_alpha();
    let c = 2.0;
    let n = 1_000_000_000usize;
    let kappa_log2 = -alpha.powi(3) * n as f64 / (1000.0 * c);
    let p_ws = 2f64.powf(kappa_log2) / 2.0;
    for s in [0, 1, 10, 100] {
        let e = error_params(alpha, 4, n, s, p_ws, 0.0).unwrap();
        assert!(e.delta.sqrt() <= alpha / 3.0);
        assert!(8.0 * e.delta_prime.sqrt() <= 4.0 * alpha / 9.0, "|S| = {s}");
    }
}

#[test]
fn sampling_error_exceeds_four_ninths_alpha_when_s_is_at_its_size_bound() {
    let alpha = chsh_alpha();
    let c = 2.0;
    let n = 1_000_000_000u64;
    let kappa = 2f64.powf(-alpha.powi(3) * n as f64 / (1000.0 * c));
    let ledger = prop32_ledger(0.25, 0.25 - alpha, n, kappa).unwrap();
    let s = ledger.s_size_bound.ceil() as usize;
    let e = error_params(alpha, 4, n as usize, s, kappa / 2.0, 0.0).unwrap();
    assert!(e.delta.sqrt() <= alpha / 3.0);
    assert!(8.0 * e.delta_prime.sqrt() > 4.0 * alpha / 9.0);
}

#[test]
fn final_inequality_chain_holds_for_every_m_above_alpha_n() {
    let alpha = chsh_alpha();
    let c = 2.0;
    let beta = alpha * alpha / (1000.0 * c);
    let n = 1e9;
    for frac in [0.2, 0.5, 0.99, 1.0] {
        let m = frac * n;
        let lhs = 2.0 * alpha * alpha * beta * m / 81.0;
        let rhs = alpha.powi(5) * n / (5.0 * 90.0 * 90.0 * c);
        assert!(lhs > rhs);
    }
}

#[test]
fn bounds_only_after_gates() {
    let d = chsh_alpha();
    let ok = certify_eof(&CertInput {
        delta: d,
        nu: 0.0,
        answer_pairs: 4,
        n: 10_000_000,
        kappa: 0.5,
    })
    .unwrap();
    assert!(ok.ef_lower_bound_bits.is_some());
    let small_n = certify_eof(&CertInput {
        n: 1_000_000,
        ..ok.input
    })
    .unwrap();
    assert!(small_n.ef_lower_bound_bits.is_none());
    assert!(small_n
        .failures
        .iter()
        .any(|f| f.code == "n_below_inverse_c1"));
    let json = serde_json::to_value(&small_n).unwrap();
    assert_eq!(json["gates_passed"], false);
    assert!(json["ef_lower_bound_bits"].is_null());
}

#[test]
fn reported_gates_are_ordered() {
    // exp(-c1 n) with c1 = alpha^3 / (1000 C) is weaker than 2^(-alpha^3 n / (1000 C))
    let d = chsh_alpha();
    for n in [2_000_000u64, 10_000_000, 100_000_000] {
        let r = certify_eof(&CertInput {
            delta: d,
            nu: 0.0,
            answer_pairs: 4,
            n,
            kappa: 0.5,
        })
        .unwrap();
        assert!(r.gates.kappa_gate.threshold <= r.gates.kappa_gate_proof.threshold);
    }
}
