//! Acceptance suite: one line per criterion with its timing; exits nonzero
//! when any criterion fails.

use std::collections::{BTreeMap, HashSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pnrp2_core::enumerate::{abelianization, todd_coxeter, Enumeration};
use pnrp2_core::klgroup::{self, klein_project, KlElement, KleinElement, Parity};
use pnrp2_core::obstruction::{
    obstruct, push_through, verify_report, Certificate, ConstraintBuilder, Mode, Origin, ParityAssignment,
    SectionCoefficients, Unknown, Verdict,
};
use pnrp2_core::presentation::{build_pn_rp2, supplementary_relations, Family, RelationId};
use pnrp2_core::rewrite::{prove_identity, rules_from_presentation, SearchLimits};
use pnrp2_core::words::{Generator, Word};

type Outcome = Result<String, String>;

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    if elapsed < limit {
        Ok(())
    } else {
        Err(format!("took {elapsed:?}, limit {limit:?}"))
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let q8 = todd_coxeter(&build_pn_rp2(2).map_err(|e| e.to_string())?, 1000).map_err(|e| e.to_string())?;
    within(t.elapsed(), Duration::from_secs(1))?;
    let Enumeration::Complete(g) = q8 else { return Err("n=2 overflowed".into()) };
    ensure(g.order() == 8, || format!("order {}", g.order()))?;
    let census = g.order_census();
    ensure(census == BTreeMap::from([(1, 1), (2, 1), (4, 6)]), || format!("census {census:?}"))?;

    let t = Instant::now();
    let z2 = todd_coxeter(&build_pn_rp2(1).map_err(|e| e.to_string())?, 1000).map_err(|e| e.to_string())?;
    within(t.elapsed(), Duration::from_secs(1))?;
    ensure(z2.order() == Some(2), || format!("n=1 order {:?}", z2.order()))?;
    Ok("P_2 has order 8 with census {1:1, 2:1, 4:6}; P_1 has order 2".into())
}

/// Z_2^n from exponent sums alone: every relator has even rho-exponents
/// (so rho_i -> e_i, B -> 0 defines a map onto Z_2^n), every B is itself an
/// exponent-sum row, and each 2 rho_i is a row modulo the B's.
fn exponent_sum_oracle(n: u32) -> bool {
    let p = build_pn_rp2(n).unwrap();
    let rows: Vec<BTreeMap<Generator, i64>> = p
        .relators()
        .iter()
        .map(|(w, _)| {
            let mut sums = BTreeMap::new();
            for (g, s) in w.unit_letters() {
                *sums.entry(g).or_insert(0) += i64::from(s);
            }
            sums.retain(|_, c| *c != 0);
            sums
        })
        .collect();
    let rho_part = |r: &BTreeMap<Generator, i64>| -> BTreeMap<Generator, i64> {
        r.iter().filter(|(g, _)| matches!(g, Generator::Rho(_))).map(|(g, c)| (*g, *c)).collect()
    };
    let onto = rows.iter().all(|r| rho_part(r).values().all(|c| c % 2 == 0));
    let b_rows = p
        .generators()
        .iter()
        .filter(|g| matches!(g, Generator::B(..)))
        .all(|g| rows.iter().any(|r| r.len() == 1 && r.get(g).is_some_and(|c| c.abs() == 1)));
    let rho_rows = (1..=n).all(|i| {
        rows.iter().any(|r| {
            let part = rho_part(r);
            part.len() == 1 && part.get(&Generator::Rho(i)).is_some_and(|c| c.abs() == 2)
        })
    });
    onto && b_rows && rho_rows
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    for n in 1..=6 {
        let factors = abelianization(&build_pn_rp2(n).map_err(|e| e.to_string())?);
        let expected = vec![BigInt::from(2); n as usize];
        ensure(factors == expected, || format!("n={n}: factors {factors:?}"))?;
        ensure(exponent_sum_oracle(n), || format!("n={n}: exponent-sum oracle disagrees"))?;
    }
    within(t.elapsed(), Duration::from_secs(5))?;
    Ok("H_1 = Z_2^n for n = 1..6, matching the exponent-sum oracle".into())
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    let mut checks = 0;
    for n in 3..=10 {
        let report = klgroup::verify_quotient_relations(n).map_err(|e| e.to_string())?;
        ensure(report.all_pass(), || format!("n={n}:\n{report}"))?;
        ensure(!report.checks.is_empty(), || format!("n={n}: empty report"))?;
        checks += report.checks.len();
    }
    within(t.elapsed(), Duration::from_secs(1))?;
    Ok(format!("{checks} implied quotient identities pass for n = 3..10"))
}

fn criterion_4() -> Outcome {
    let t = Instant::now();
    let mut checks = 0;
    for n in 3..=8 {
        for i in 1..n {
            let report = klgroup::verify_prop_klein_images(i, n).map_err(|e| e.to_string())?;
            ensure(report.all_pass(), || format!("i={i}, n={n}:\n{report}"))?;
            for key in ["pi(d_i)=h", "pi(e_i,n)", "rho_i h", "rho_n h", "klein(h)"] {
                ensure(report.checks.iter().any(|c| c.id.contains(key)), || format!("i={i}, n={n}: no check {key}"))?;
            }
            checks += report.checks.len();
        }
    }
    within(t.elapsed(), Duration::from_secs(2))?;
    Ok(format!("{checks} Klein-image checks pass for all i < n, n = 3..8"))
}

fn random_klein_word(rng: &mut ChaCha8Rng, b: Generator, rho: Generator) -> Word {
    let len = rng.gen_range(0..8);
    let pairs: Vec<(Generator, i64)> =
        (0..len).map(|_| (if rng.gen_bool(0.5) { b } else { rho }, if rng.gen_bool(0.5) { 1 } else { -1 })).collect();
    Word::from_pairs(4, &pairs)
}

fn criterion_5() -> Outcome {
    let (b, rho) = (Generator::B(1, 5), Generator::Rho(5));
    let h = Word::from_pairs(4, &[(b, 1), (rho, -1), (b, 1), (rho, 1)]);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    for trial in 0..1000 {
        let factors = rng.gen_range(0..=20);
        let mut w = Word::identity(4);
        for _ in 0..factors {
            let c = random_klein_word(&mut rng, b, rho);
            let hh = if rng.gen_bool(0.5) { h.clone() } else { h.inverse() };
            w = w.mul(&c.mul(&hh).mul(&c.inverse()));
        }
        let image = klein_project(&w, b, rho).map_err(|e| e.to_string())?;
        ensure(image.is_identity(), || format!("trial {trial}: {w} projects to {image}"))?;
    }
    for m0 in -6i64..=6 {
        for m in -6i64..=6 {
            let w = Word::from_pairs(4, &[(rho, m0), (b, m)]);
            let image = klein_project(&w, b, rho).map_err(|e| e.to_string())?;
            ensure(image == KleinElement::new(m0, m), || format!("rho^{m0} B^{m} projects to {image}"))?;
            ensure(image.is_identity() == (m0 == 0 && m == 0), || format!("rho^{m0} B^{m}: triviality"))?;
        }
    }
    Ok("1000 products of conjugates of h project trivially; rho^a B^b projects to (a, b)".into())
}

fn criterion_6() -> Outcome {
    let t = Instant::now();
    let mut proved = 0;
    let mut longest = 0;
    for n in 2..=3 {
        let rules = rules_from_presentation(&build_pn_rp2(n).map_err(|e| e.to_string())?);
        for rel in supplementary_relations(n) {
            let out = prove_identity(&rel.lhs, &rel.rhs, &rules, SearchLimits::default()).map_err(|e| e.to_string())?;
            let trace = out.trace().ok_or_else(|| format!("{} at n={n}: {out:?}", rel.id))?;
            ensure(trace.len() <= 10, || format!("{}: trace of length {}", rel.id, trace.len()))?;
            let end = trace.replay(&rules).map_err(|e| format!("{}: replay failed: {e}", rel.id))?;
            ensure(end == rel.rhs.free_reduce() && trace.verify(&rules), || format!("{}: replay mismatch", rel.id))?;
            longest = longest.max(trace.len());
            proved += 1;
        }
    }
    within(t.elapsed(), Duration::from_secs(30))?;
    Ok(format!("{proved} supplementary identities proved and replayed (longest trace {longest})"))
}

/// Recomputes `sum multiplier * equation` from scratch and checks that the
/// coefficients vanish modulo the modulus while the constant does not.
fn independent_certificate_check(c: &Certificate) -> bool {
    let mut coeffs: BTreeMap<Unknown, BigInt> = BTreeMap::new();
    let mut constant = BigInt::zero();
    for e in &c.entries {
        constant += &e.multiplier * e.equation.expr.constant_term();
        for (u, x) in e.equation.expr.terms() {
            *coeffs.entry(u.clone()).or_default() += &e.multiplier * x;
        }
    }
    let reduce = |x: &BigInt| if c.modulus.is_zero() { x.clone() } else { x.mod_floor(&c.modulus) };
    !c.entries.is_empty() && coeffs.values().all(|x| reduce(x).is_zero()) && !reduce(&constant).is_zero()
}

fn criterion_7() -> Outcome {
    let t = Instant::now();
    let r2 = obstruct(2, Mode::Full).map_err(|e| e.to_string())?;
    within(t.elapsed(), Duration::from_secs(60))?;
    ensure(r2.verdict == Verdict::Sat, || format!("n=2 verdict {}", r2.verdict))?;
    let sat = r2.sat_branch().ok_or("no SAT branch")?;
    let witness = sat.witness().ok_or("no witness")?;
    let system = ConstraintBuilder::new(2, Mode::Full)
        .map_err(|e| e.to_string())?
        .system(&sat.parity)
        .map_err(|e| e.to_string())?;
    ensure(system.iter().all(|e| e.expr.eval(witness).is_zero()), || "witness fails an equation".into())?;
    ensure(system.unknowns().iter().all(|u| witness.contains_key(u)), || "witness leaves unknowns unset".into())?;

    let mut detail = vec![format!("n=2 SAT ({} equations)", system.len())];
    for n in [3, 4] {
        let t = Instant::now();
        let r = obstruct(n, Mode::Full).map_err(|e| e.to_string())?;
        within(t.elapsed(), Duration::from_secs(60))?;
        ensure(r.verdict == Verdict::Unsat, || format!("n={n} verdict {}", r.verdict))?;
        ensure(r.m0_refutation.is_none() && !r.branches.is_empty(), || format!("n={n}: no branches"))?;
        ensure(verify_report(&r).map_err(|e| e.to_string())?, || format!("n={n}: report does not re-verify"))?;
        let builder = ConstraintBuilder::new(n, Mode::Full).map_err(|e| e.to_string())?;
        for b in &r.branches {
            let c = b.certificate().ok_or_else(|| format!("n={n}: branch without certificate"))?;
            let sys = builder.system(&b.parity).map_err(|e| e.to_string())?;
            ensure(c.matches(&sys) && independent_certificate_check(c), || format!("n={n}: certificate fails\n{c}"))?;
        }
        if n == 3 {
            let cites = |c: &Certificate| {
                c.cited().any(|e| matches!(e.origin, Origin::Relation { id: RelationId::Surface { .. }, .. }))
            };
            ensure(r.branches.iter().all(|b| b.certificate().is_some_and(cites)), || {
                "n=3: a branch avoids the surface parity".into()
            })?;
        } else {
            let beta = Unknown::Beta { i: 2, j: 3, k: 2 };
            let commute = |o: &Origin| matches!(o, Origin::Relation { id: RelationId::RhoB { k: 1, i: 2, j: 3 }, .. });
            let clash = r.branches.iter().filter_map(|b| b.certificate()).any(|c| {
                c.cited().any(|e| {
                    commute(&e.origin) && e.expr.coeff(&beta).abs() == BigInt::from(1) && e.expr.terms().len() == 1
                }) && c.cited().any(|e| !commute(&e.origin) && e.expr.coeff(&beta).is_odd())
            });
            ensure(clash, || "n=4: no branch cites the beta[2,3,2] clash".into())?;
        }
        detail.push(format!("n={n} UNSAT ({} branches)", r.branches.len()));
    }
    Ok(detail.join(", "))
}

fn criterion_8() -> Outcome {
    let t = Instant::now();
    let mut branches = 0;
    for n in 3..=10 {
        let r = obstruct(n, Mode::PaperSubset).map_err(|e| e.to_string())?;
        ensure(r.verdict == Verdict::Unsat, || format!("n={n}: {}", r.verdict))?;
        ensure(r.branches.iter().all(|b| b.certificate().is_some_and(Certificate::verify)), || {
            format!("n={n}: bad certificate")
        })?;
        branches += r.branches.len();
    }
    within(t.elapsed(), Duration::from_secs(120))?;
    Ok(format!("UNSAT for n = 3..10 ({branches} branches refuted)"))
}

fn random_values(rng: &mut ChaCha8Rng, coeffs: &SectionCoefficients) -> (BTreeMap<Unknown, BigInt>, ParityAssignment) {
    let values: BTreeMap<Unknown, BigInt> =
        coeffs.all_unknowns().into_iter().map(|u| (u, BigInt::from(rng.gen_range(-9i64..=9)))).collect();
    let parity: ParityAssignment = coeffs
        .m0_unknowns()
        .into_iter()
        .map(|u| {
            let p = Parity::of(&values[&u]);
            (u, p)
        })
        .collect();
    (values, parity)
}

/// The section image of `w` computed concretely: the word
/// `s(g_1)^e_1 ... s(g_k)^e_k w^-1`, with `s(g) = H_g g`, evaluated in K/L.
fn concrete_head(w: &Word, coeffs: &SectionCoefficients, values: &BTreeMap<Unknown, BigInt>) -> KlElement {
    let n = coeffs.n();
    let mut image = Word::identity(n);
    for (g, e) in w.unit_letters() {
        let coordinates = |k: u32| match g {
            Generator::Rho(i) => values[&SectionCoefficients::alpha(i, k)].clone(),
            Generator::B(i, j) => values[&SectionCoefficients::beta(i, j, k)].clone(),
            Generator::A(_) => unreachable!(),
        };
        let head = KlElement::new(n, coordinates(0), (1..n).map(coordinates).collect());
        let s = head.to_word().mul(&Word::from_pairs(n, &[(g, 1)]));
        image = image.mul(&if e > 0 { s } else { s.inverse() });
    }
    klgroup::eval_in_quotient(&image.mul(&w.inverse())).expect("the tail cancels")
}

fn criterion_9() -> Outcome {
    let n = 3;
    let coeffs = SectionCoefficients::new(n).map_err(|e| e.to_string())?;
    let gens = pnrp2_core::presentation::generators(n);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
    for trial in 0..500 {
        let (values, parity) = random_values(&mut rng, &coeffs);
        let len = rng.gen_range(1..=8);
        let pairs: Vec<(Generator, i64)> =
            (0..len).map(|_| (gens[rng.gen_range(0..gens.len())], if rng.gen_bool(0.5) { 1 } else { -1 })).collect();
        let w = Word::from_pairs(n, &pairs);
        let (head, _) = push_through(&w, &coeffs, &parity).map_err(|e| e.to_string())?;
        let symbolic = head.instantiate(&values);
        let concrete = concrete_head(&w, &coeffs, &values);
        ensure(symbolic == concrete, || format!("trial {trial}: {w}: symbolic {symbolic} vs concrete {concrete}"))?;
    }
    Ok("500 random instantiations agree exactly at n = 3".into())
}

fn criterion_10() -> Outcome {
    for n in 2..=8 {
        let lower = build_pn_rp2(n).map_err(|e| e.to_string())?;
        let upper = build_pn_rp2(n + 1).map_err(|e| e.to_string())?;
        let upper_set: HashSet<String> = upper.relators().iter().map(|(w, _)| w.to_string()).collect();
        for (w, fam) in lower.relators() {
            let present = upper_set.contains(&w.to_string());
            match fam {
                Family::ArtinA | Family::RhoRhoB | Family::RhoBD => {
                    ensure(present, || format!("n={n}: {} relator {w} missing upstairs", fam.tag()))?
                }
                Family::SurfaceC => ensure(!present, || format!("n={n}: surface relator {w} inherited"))?,
                Family::Supplementary => {}
            }
        }
    }
    Ok("families (a), (b), (d) are inherited and (c) is not, for n = 2..8".into())
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("coset enumeration of P_1 and P_2", criterion_1),
        ("abelianization Z_2^n", criterion_2),
        ("implied quotient relations", criterion_3),
        ("Klein-bottle images", criterion_4),
        ("Klein projection", criterion_5),
        ("supplementary identities by rewriting", criterion_6),
        ("obstruction in full mode", criterion_7),
        ("obstruction on the reduced relation set", criterion_8),
        ("symbolic and concrete section images agree", criterion_9),
        ("inherited relators", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = run();
        let elapsed = t.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS [{elapsed:.2?}] {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL [{elapsed:.2?}] {name}: {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
