//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::time::Instant;

use nalgebra::DVector;
use ncert::evalnum::{
    eval_expr, eval_poly, sample_domain, sample_zr, test_equivalence, DomainSpec, ExtendedPoint, MatrixPoint, Verdict,
    DEFAULT_COND_CAP,
};
use ncert::freealg::{alphabet, words_up_to, Letter, LinearPencil, MatPoly};
use ncert::lift::{apply_rules, build_hat, build_mr, build_o, closure_cr, estimate_d, probe_points, OTag};
use ncert::linalg::{self, CMat, C64};
use ncert::rexpr::{parse, parse_expr, MatRatExpr, RatExpr};
use ncert::sdp::{self, Constraint, RowBuilder, SdpInstance, SdpOutcome, Solution};
use ncert::sos::{
    build_gram_problem, certify_pencil_rational, certify_polynomial, certify_rational_assembled, check_positivity,
    eval_certificate, extract_certificate, verify_certificate, Certificate, CertifyOptions,
};
use ncert::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn poly(s: &str) -> MatPoly {
    parse(s).unwrap().to_matpoly().unwrap()
}

fn interval() -> Vec<MatPoly> {
    vec![poly("1 - x1^2")]
}

fn err(e: Error) -> String {
    e.to_string()
}

// 1 ---------------------------------------------------------------------

fn random_poly(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> MatPoly {
    let words = words_up_to(&alphabet(2, 1), 2);
    let terms: Vec<_> = (0..rng.random_range(1..=4))
        .map(|_| {
            let w = words[rng.random_range(0..words.len())].clone();
            (w, linalg::random_complex_matrix(rng, rows, cols))
        })
        .collect();
    MatPoly::from_terms(rows, cols, terms).unwrap()
}

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> ExtendedPoint {
    let xs = (0..2).map(|_| linalg::random_hermitian(rng, n)).collect();
    let base = MatrixPoint::with_size(n, xs).unwrap();
    ExtendedPoint::new(base, vec![linalg::random_complex_matrix(rng, n, n)]).unwrap()
}

fn rel(a: &CMat, b: &CMat) -> f64 {
    linalg::max_abs(&(a - b)) / (1.0 + linalg::max_abs(a).max(linalg::max_abs(b)))
}

fn algebra_laws() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for k in 0..1000 {
        let (r, s, t) = (rng.random_range(1..=2), rng.random_range(1..=2), rng.random_range(1..=2));
        let a = random_poly(&mut rng, r, s);
        let a2 = random_poly(&mut rng, r, s);
        let b = random_poly(&mut rng, s, t);
        let ab = a.mul(&b).unwrap();
        ensure(ab.adjoint().max_coefficient_diff(&b.adjoint().mul(&a.adjoint()).unwrap()) < 1e-12, || {
            format!("check {k}: (ab)* != b*a*")
        })?;
        ensure(a.adjoint().adjoint() == a, || format!("check {k}: a** != a"))?;
        let n = rng.random_range(1..=3);
        let p = random_point(&mut rng, n);
        let ev = |q: &MatPoly| eval_poly(q, &p).unwrap();
        worst = worst
            .max(rel(&ev(&a.add(&a2).unwrap()), &(ev(&a) + ev(&a2))))
            .max(rel(&ev(&ab), &(ev(&a) * ev(&b))))
            .max(rel(&ev(&a.adjoint()), &ev(&a).adjoint()));
    }
    ensure(worst <= 1e-10, || format!("evaluation deviates by {worst:e}"))?;
    Ok(format!("1000 checks, max eval deviation {worst:.1e}"))
}

// 2 ---------------------------------------------------------------------

fn random_tree(rng: &mut ChaCha8Rng, depth: usize) -> RatExpr {
    if depth == 0 || rng.random_bool(0.3) {
        return match rng.random_range(0..4) {
            0 => RatExpr::real(rng.random_range(-6..7) as f64 / 2.0),
            1 => RatExpr::Scalar(C64::new(rng.random_range(-3..4) as f64, rng.random_range(-3..4) as f64)),
            2 => RatExpr::x(rng.random_range(1..4)),
            _ => {
                let j = rng.random_range(1..3);
                if rng.random_bool(0.5) {
                    RatExpr::u(j)
                } else {
                    RatExpr::Letter(Letter::UStar(j))
                }
            }
        };
    }
    let kids = |rng: &mut ChaCha8Rng| (0..rng.random_range(2..4)).map(|_| random_tree(rng, depth - 1)).collect();
    match rng.random_range(0..4) {
        0 => RatExpr::sum(kids(rng)),
        1 => RatExpr::product(kids(rng)),
        2 => RatExpr::inverse(random_tree(rng, depth - 1)).unwrap_or_else(|_| RatExpr::x(1)),
        _ => RatExpr::adjoint(random_tree(rng, depth - 1)),
    }
}

fn parser_round_trip() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for k in 0..1000 {
        let e = random_tree(&mut rng, 5);
        let text = e.to_string();
        let back = parse_expr(&text).map_err(|er| format!("tree {k}: `{text}` fails to parse: {er}"))?;
        ensure(back == e, || format!("tree {k}: `{text}` parses to a different tree"))?;
    }
    let m = parse("[[7*i, 1000*x1*x2*x1 - x2^2], [x1^2 + x1*x2, 0]]").unwrap().to_matpoly().unwrap();
    let expected = parse("[[-7*i, x1^2 + x2*x1], [1000*x1*x2*x1 - x2^2, 0]]").unwrap().to_matpoly().unwrap();
    ensure(m.adjoint() == expected, || format!("worked adjoint example gives {}", m.adjoint()))?;
    Ok("1000 random trees round-trip; worked adjoint example exact".into())
}

// 3 ---------------------------------------------------------------------

fn equivalence_oracle() -> Check {
    let a = parse("x1*x1^-1").unwrap();
    let one = parse("1").unwrap();
    let r = test_equivalence(&a, &one, &[1, 2, 3, 4], 20, 1e-8, 0).map_err(err)?;
    ensure(r.verdict == Verdict::EquivalentSoFar, || "x1*x1^-1 vs 1 distinguished".into())?;
    let (p, q) = (parse("x1*x2").unwrap(), parse("x2*x1").unwrap());
    let r = test_equivalence(&p, &q, &[2], 20, 1e-8, 0).map_err(err)?;
    let hits = r.per_size[0].distinguishing;
    ensure(matches!(r.verdict, Verdict::Distinguished { .. }) && hits >= 19, || format!("{hits}/20 at n=2"))?;
    Ok(format!("x1*x1^-1 ~ 1 over sizes 1-4; x1*x2 vs x2*x1 distinguished in {hits}/20 at n=2"))
}

// 4 ---------------------------------------------------------------------

fn lift_soundness() -> Check {
    let ps = interval();
    let dom = DomainSpec::poly_list(ps.clone()).unwrap();
    let mut worst = [0.0f64; 3];
    for text in ["(2 - x1)^-1", "x1*(2 - x1)^-1*x1"] {
        let q = parse(text).unwrap();
        let lift = build_hat(&q).map_err(err)?;
        let probes = probe_points(&dom, 1, 3, 20, 0).map_err(err)?;
        let d: Vec<f64> = (0..lift.u_arity).map(|j| estimate_d(&lift, j, &probes, 4.0).unwrap().d).collect();
        let o = build_o(&ps, &lift, &d).map_err(err)?;
        for n in 1..=3 {
            for x in sample_domain(&dom, n, 50, 40 + n as u64).map_err(err)? {
                let point = ExtendedPoint::new(x.clone(), lift.u_values(&x).map_err(err)?).unwrap();
                let direct = eval_expr(&q, &ExtendedPoint::from(x), DEFAULT_COND_CAP).map_err(err)?;
                let lifted = eval_poly(&lift.hat_q, &point).map_err(err)?;
                worst[0] = worst[0].max(rel(&direct, &lifted));
                for (tag, p) in &o.elements {
                    let v = eval_poly(p, &point).map_err(err)?;
                    match tag {
                        t if t.is_relation() => worst[1] = worst[1].max(linalg::max_abs(&v)),
                        OTag::NormCap(_) => worst[2] = worst[2].min(linalg::min_eigenvalue(&v)),
                        _ => {}
                    }
                }
            }
        }
    }
    ensure(worst[0] <= 1e-10, || format!("lifted value deviates by {:e}", worst[0]))?;
    ensure(worst[1] <= 1e-10, || format!("relation element reaches {:e}", worst[1]))?;
    ensure(worst[2] >= 0.0, || format!("norm cap has eigenvalue {:e}", worst[2]))?;
    Ok(format!("hat-q deviation {:.1e}, relations {:.1e}, caps PSD", worst[0], worst[1]))
}

// 5 ---------------------------------------------------------------------

fn closure_machinery() -> Check {
    for (text, want) in [("x1^-1", "x1*u1 - 1"), ("(3 - x1)^-1", "(3 - x1)*u1 - 1")] {
        let set = closure_cr(&parse(text).unwrap()).map_err(err)?;
        let mr = build_mr(&set).map_err(err)?;
        ensure(mr.len() == 1 && mr[0].max_coefficient_diff(&poly(want)) == 0.0, || {
            format!("{text}: relations {:?}", mr.iter().map(|m| m.to_string()).collect::<Vec<_>>())
        })?;
        let keys: std::collections::HashSet<String> = set.cr.iter().map(|e| e.to_string()).collect();
        for e in &set.cr {
            for next in apply_rules(e) {
                ensure(keys.contains(&next.to_string()), || format!("{text}: rules add {next}"))?;
            }
        }
    }
    Ok("relation sets {x1*u1 - 1}, {(3 - x1)*u1 - 1}; fixpoints closed".into())
}

// 6 ---------------------------------------------------------------------

fn zr_properties() -> Check {
    let mut worst = [0.0f64; 2];
    let mut count = 0;
    let cases = [
        ("(3 - x1)^-1", LinearPencil::interval()),
        (
            "x2*(2 - x1)^-1*x2 + (3 + x2)^-1",
            LinearPencil::monic(vec![linalg::diag_real(&[1.0, -1.0, 0.0, 0.0]), linalg::diag_real(&[0.0, 0.0, 1.0, -1.0])])
                .unwrap(),
        ),
    ];
    for (text, l) in cases {
        let r = parse(text).unwrap();
        let set = closure_cr(&r).map_err(err)?;
        let mr = build_mr(&set).map_err(err)?;
        let lift = build_hat(&r).map_err(err)?;
        for n in 1..=4 {
            for s in sample_zr(&mr, &l, &lift.g_list, 1, n, 10, n as u64).map_err(err)? {
                count += 1;
                for m in &mr {
                    let mv = eval_poly(m, &s.point).map_err(err)? * &s.v;
                    worst[0] = worst[0].max(mv.norm() / s.v.norm());
                }
                let rt: DVector<C64> = eval_poly(&lift.hat_q, &s.point).map_err(err)? * &s.v;
                let rx = eval_expr(&r, &ExtendedPoint::from(s.point.base().clone()), DEFAULT_COND_CAP).map_err(err)?;
                worst[1] = worst[1].max((rt - rx * &s.v).norm());
            }
        }
    }
    ensure(worst[0] <= 1e-9, || format!("|m v| reaches {:e}", worst[0]))?;
    ensure(worst[1] <= 1e-8, || format!("r~ v - r v reaches {:e}", worst[1]))?;
    Ok(format!("{count} samples: |m v| <= {:.1e}|v|, |r~ v - r v| <= {:.1e}", worst[0], worst[1]))
}

// shared by 7-10 --------------------------------------------------------

/// A returned certificate with the rational target it stands for, the lift
/// used to evaluate its `u` letters, and the domain it was certified on.
struct Issued {
    name: String,
    cert: Certificate,
    q: MatRatExpr,
    lift: ncert::lift::LiftResult,
    dom: DomainSpec,
}

fn issue_polynomial(log: &mut Vec<Issued>, text: &str, ps: &[MatPoly], cert: Certificate) {
    let q = parse(text).unwrap();
    let lift = build_hat(&q).unwrap();
    let dom = DomainSpec::poly_list(ps.to_vec()).unwrap();
    log.push(Issued { name: text.into(), cert, q, lift, dom });
}

fn polynomial_certification(log: &mut Vec<Issued>) -> Check {
    let opts = CertifyOptions::default();
    let cert = certify_polynomial(&poly("2 - x1^2"), &interval(), &opts).map_err(err)?;
    ensure(cert.delta == 1 && cert.residual <= 1e-6, || format!("delta {} residual {:e}", cert.delta, cert.residual))?;
    let residual = cert.residual;
    issue_polynomial(log, "2 - x1^2", &interval(), cert);
    match certify_polynomial(&poly("x1"), &interval(), &opts) {
        Err(Error::NotCertified { .. }) => {}
        other => return Err(format!("q = x1 gave {other:?}")),
    }
    let dom = DomainSpec::poly_list(interval()).unwrap();
    let w = check_positivity(&parse("x1").unwrap(), &dom, 3, 20, 0).map_err(err)?;
    ensure(w.min_eigenvalue < 0.0, || "no negative witness for x1".into())?;
    Ok(format!("2 - x1^2 at delta 1, residual {residual:.1e}; x1 not certified, witness {:.3}", w.min_eigenvalue))
}

fn rational_certification(log: &mut Vec<Issued>) -> Check {
    let opts = CertifyOptions::default();
    let q = parse("(2 - x1)^-1").unwrap();
    let (out, assembled) = certify_rational_assembled(&q, &interval(), &opts).map_err(err)?;
    let cert = &out.certificate;
    ensure(cert.residual <= 1e-6, || format!("residual {:e}", cert.residual))?;
    let dom = DomainSpec::poly_list(interval()).unwrap();
    let pts: Vec<MatrixPoint> =
        (1..=4).flat_map(|n| sample_domain(&dom, n, 25, 800 + n as u64).unwrap()).collect();
    let agreement = ncert::sos::pointwise_agreement(cert, &q, &out.lift, &pts).map_err(err)?;
    ensure(agreement <= 1e-6, || format!("agreement {agreement:e}"))?;
    let [(_, d, cap)] = &assembled.caps[..] else {
        return Err(format!("expected one cap certificate, got {}", assembled.caps.len()));
    };
    let want = poly(&format!("{d}*(2 - x1)^2 - 1"));
    let got = cap.target.to_matpoly().map_err(err)?;
    ensure(got.max_coefficient_diff(&want) < 1e-12, || format!("cap target {got}"))?;
    ensure(cap.residual <= 1e-6 && assembled.residual <= 1e-6, || {
        format!("cap residual {:e}, assembled residual {:e}", cap.residual, assembled.residual)
    })?;
    let msg = format!(
        "delta {}, residual {:.1e}, agreement {agreement:.1e} at {} points; D(2 - x1)^2 - 1 certified with D = {d}",
        cert.delta,
        cert.residual,
        pts.len()
    );
    log.push(Issued { name: "(2 - x1)^-1".into(), cert: out.certificate.clone(), q, lift: out.lift, dom });
    Ok(msg)
}

fn pencil_pipeline(log: &mut Vec<Issued>) -> Check {
    let l = LinearPencil::interval();
    let r = parse("(3 - x1)^-1").unwrap();
    let mut opts = CertifyOptions::default();
    let mut note = String::new();
    let out = match certify_pencil_rational(&r, &l, &opts) {
        Ok(out) => out,
        Err(Error::NotCertified { .. }) => {
            note = " (inconclusive at delta 3, escalated to 4)".into();
            opts.delta_max = 4;
            certify_pencil_rational(&r, &l, &opts).map_err(err)?
        }
        Err(e) => return Err(err(e)),
    };
    ensure(out.certificate.residual <= 1e-6 && out.agreement <= 1e-6 && out.samples >= 100, || {
        format!("residual {:e}, agreement {:e}", out.certificate.residual, out.agreement)
    })?;
    match certify_pencil_rational(&parse("x1").unwrap(), &l, &CertifyOptions::default()) {
        Err(Error::NotCertified { .. }) => {}
        other => return Err(format!("r = x1 gave {other:?}")),
    }
    let dom = DomainSpec::pencil(l.clone());
    let w = check_positivity(&parse("x1").unwrap(), &dom, 3, 20, 0).map_err(err)?;
    ensure(w.min_eigenvalue < 0.0, || "no negative witness for x1".into())?;
    let msg = format!(
        "delta {}, residual {:.1e}, agreement {:.1e} at {} points{note}; x1 not certified, witness {:.3}",
        out.certificate.delta, out.certificate.residual, out.agreement, out.samples, w.min_eigenvalue
    );
    log.push(Issued { name: "(3 - x1)^-1 on L".into(), cert: out.certificate, q: r, lift: out.lift, dom });
    Ok(msg)
}

fn soundness_anchor(log: &mut Vec<Issued>) -> Check {
    let opts = CertifyOptions::default();
    let box2 = vec![poly("1 - x1^2"), poly("1 - x2^2")];
    for (text, ps) in [
        ("(1 + x1)^2", interval()),
        ("[[2, x1], [x1, 2]]", interval()),
        ("5 - x1^2 - x2^2 + x1*x2 + x2*x1", box2.clone()),
    ] {
        let cert = certify_polynomial(&poly(text), &ps, &opts).map_err(|e| format!("{text}: {e}"))?;
        issue_polynomial(log, text, &ps, cert);
    }
    let mut worst_res: f64 = 0.0;
    let mut worst_pos: f64 = f64::INFINITY;
    for item in log.iter() {
        let c = &item.cert;
        let res = verify_certificate(&c.target, c, &c.generators, &c.ideal_gens).map_err(err)?;
        ensure(res <= 1e-6, || format!("{}: verifier residual {res:e}", item.name))?;
        worst_res = worst_res.max(res);
        for n in 1..=3 {
            for x in sample_domain(&item.dom, n, 20, 900 + n as u64).map_err(err)? {
                let q = eval_expr(&item.q, &ExtendedPoint::from(x.clone()), DEFAULT_COND_CAP).map_err(err)?;
                let q = linalg::hermitian_part(&q);
                let scale = 1.0 + linalg::spectral_norm(&q);
                let lam = linalg::min_eigenvalue(&q) / scale;
                worst_pos = worst_pos.min(lam);
                ensure(lam >= -1e-6, || format!("{}: q(X) has eigenvalue {lam:e}", item.name))?;
                // the certificate itself is PSD at the point
                let point = ExtendedPoint::new(x.clone(), item.lift.u_values(&x).map_err(err)?).unwrap();
                let e = eval_certificate(c, &point).map_err(err)?;
                let lam_e = linalg::min_eigenvalue(&linalg::hermitian_part(&e)) / scale;
                ensure(lam_e >= -1e-6, || format!("{}: expansion has eigenvalue {lam_e:e}", item.name))?;
            }
        }
    }
    Ok(format!(
        "{} certificates: max residual {worst_res:.1e}, min scaled eigenvalue {worst_pos:.2e}",
        log.len()
    ))
}

// 11 --------------------------------------------------------------------

fn random_psd(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    let g = linalg::random_complex_matrix(rng, n, n);
    &g * g.adjoint()
}

fn gram_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let problems = [
        build_gram_problem(
            &poly("[[2, x1*x2], [x2*x1, 1 + u1 + u1*]]"),
            &[poly("1 - x1^2"), poly("[[1 + x1, x2], [x2, 1 - x1]]")],
            &[poly("x1*u1 - 1")],
            1,
        ),
        build_gram_problem(&poly("2 - x1^2 + x1*x2*x1"), &[poly("1 - x1^2"), poly("1 - x2^2")], &[], 2),
    ];
    let mut worst: f64 = 0.0;
    let mut k = 0;
    for p in problems {
        let p = p.map_err(err)?;
        for _ in 0..25 {
            let blocks: Vec<CMat> = p.instance.block_dims.iter().map(|&n| random_psd(&mut rng, n)).collect();
            let free: Vec<f64> = (0..p.instance.n_free).map(|_| rng.random::<f64>() - 0.5).collect();
            let sol = Solution { blocks: blocks.clone(), free: free.clone(), margin: 0.0, residual: 0.0, iterations: 0 };
            let predicted = p.predict(&blocks, &free);
            let expanded = extract_certificate(&p, &sol).map_err(err)?.expand().map_err(err)?;
            let scale = 1.0 + expanded.max_coefficient();
            worst = worst.max(expanded.max_coefficient_diff(&predicted) / scale);
            k += 1;
        }
    }
    ensure(worst <= 1e-12, || format!("relative deviation {worst:e}"))?;
    Ok(format!("{k} random assignments, max relative deviation {worst:.1e}"))
}

// 12 --------------------------------------------------------------------

fn random_instance(seed: u64) -> (SdpInstance, bool) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nb = rng.random_range(1..=3);
    let dims: Vec<usize> = (0..nb).map(|_| rng.random_range(1..=20)).collect();
    let n_free = rng.random_range(0..=2);
    let x: Vec<CMat> = dims
        .iter()
        .map(|&n| {
            let rank = rng.random_range(1..=n);
            let g = linalg::random_complex_matrix(&mut rng, n, rank);
            &g * g.adjoint()
        })
        .collect();
    let y: Vec<f64> = (0..n_free).map(|_| rng.random::<f64>()).collect();
    let mut inst = SdpInstance::new(dims.clone(), n_free);
    let planted = rng.random_bool(0.7);
    for _ in 0..rng.random_range(1..=150) {
        let mut r = RowBuilder::new();
        for _ in 0..rng.random_range(1..=6) {
            let b = rng.random_range(0..nb);
            let k = rng.random_range(0..dims[b]);
            let l = rng.random_range(0..dims[b]);
            r.add(b, k, l, linalg::random_complex(&mut rng));
        }
        if n_free > 0 && rng.random_bool(0.3) {
            r.add_free(rng.random_range(0..n_free), rng.random::<f64>() - 0.5);
        }
        let row = r.finish(0.0);
        let rhs = if planted { row.eval(&x, &y) } else { 4.0 * rng.random::<f64>() - 2.0 };
        inst.push(Constraint { rhs, ..row });
    }
    (inst, planted)
}

fn sdp_contract() -> Check {
    let mut counts = [0usize; 3];
    for seed in 0..200 {
        let (inst, planted) = random_instance(1000 + seed);
        let first = sdp::solve_default(&inst);
        match &first {
            Ok(SdpOutcome::Feasible(sol)) => {
                counts[0] += 1;
                let res = inst.residual(&sol.blocks, &sol.free);
                ensure(res <= 1e-8, || format!("instance {seed}: residual {res:e}"))?;
                for b in &sol.blocks {
                    let lam = linalg::min_eigenvalue(b);
                    ensure(lam >= -1e-8, || format!("instance {seed}: eigenvalue {lam:e}"))?;
                }
            }
            Ok(SdpOutcome::Infeasible { .. }) => {
                ensure(!planted, || format!("instance {seed}: planted solution declared infeasible"))?;
                counts[1] += 1
            }
            Err(Error::SolverStalled { .. }) => counts[2] += 1,
            Err(e) => return Err(format!("instance {seed}: {e}")),
        }
        if seed % 20 == 0 {
            let second = sdp::solve_default(&inst);
            ensure(format!("{first:?}") == format!("{second:?}"), || format!("instance {seed}: runs differ"))?;
        }
    }
    Ok(format!(
        "200 instances: {} feasible (all within contract), {} infeasible, {} stalled; reruns identical",
        counts[0], counts[1], counts[2]
    ))
}

fn main() {
    let start = Instant::now();
    let mut log = Vec::new();
    let results: Vec<(&str, Check)> = vec![
        ("algebra laws", algebra_laws()),
        ("parser round-trip", parser_round_trip()),
        ("equivalence oracle", equivalence_oracle()),
        ("lift soundness", lift_soundness()),
        ("closure machinery", closure_machinery()),
        ("annihilated variety", zr_properties()),
        ("polynomial certification", polynomial_certification(&mut log)),
        ("rational certification", rational_certification(&mut log)),
        ("pencil pipeline", pencil_pipeline(&mut log)),
        ("soundness anchor", soundness_anchor(&mut log)),
        ("gram construction oracle", gram_oracle()),
        ("sdp contract", sdp_contract()),
    ];
    let mut failed = 0;
    for (k, (name, r)) in results.iter().enumerate() {
        match r {
            Ok(msg) => println!("criterion {:>2} {name}: PASS ({msg})", k + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({msg})", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed in {:.1?}", results.len() - failed, results.len(), start.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
