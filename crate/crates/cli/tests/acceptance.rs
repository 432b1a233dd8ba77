//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use cfw::spec;
use cfw_core::contfrac::{
    check_approx_bound_with, check_growth_bound_with, mirror_formula_with, periodic_value,
    ConvergentTable, Decision, RationalInterval,
};
use cfw_core::criteria::{
    detect_chain, pigeonhole_extract, quasi_periodic_witnesses, QuasiBlock, SearchKind,
};
use cfw_core::witness::{exponent_fit, verify, verify_mirror, verify_repeat};
use cfw_core::words::complexity;
use cfw_core::{
    Dfao, EventuallyPeriodic, FiniteWord, QuasiPeriodicSpec, SequenceSource, VerifyOptions,
    Witness, WitnessKind,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn word(v: Vec<u64>) -> FiniteWord {
    FiniteWord::new(v).unwrap()
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn random_word(rng: &mut ChaCha8Rng, len: std::ops::RangeInclusive<usize>, max: u64) -> Vec<u64> {
    let n = rng.gen_range(len);
    (0..n).map(|_| rng.gen_range(1..=max)).collect()
}

// [0; a_1, ..., a_n] by backward evaluation.
fn backward(a: &[u64]) -> BigRational {
    let mut x = BigRational::zero();
    for &d in a.iter().rev() {
        x = (BigRational::from_integer(BigInt::from(d)) + x).recip();
    }
    x
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn mirror_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checks = 0;
    for i in 0..1000 {
        let a = random_word(&mut rng, 1..=50, 1_000_000);
        let w = word(a.clone());
        let t = ConvergentTable::new(&w);
        for l in 1..=a.len() {
            ensure(mirror_formula_with(&t, &w, l).map_err(|e| e.to_string())?, || {
                format!("word {i}, l = {l}")
            })?;
            checks += 1;
        }
        // independent backward evaluation at a random index
        let l = rng.gen_range(1..=a.len());
        let rev: Vec<u64> = a[..l].iter().rev().copied().collect();
        let ratio = BigRational::new(t.q(l as i64 - 1).clone(), t.q(l as i64).clone());
        ensure(ratio == backward(&rev), || format!("oracle mismatch, word {i}, l = {l}"))?;
    }
    Ok(format!("{checks} exact identities"))
}

fn classical_bounds() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checks = 0usize;
    for i in 0..1000 {
        let a = random_word(&mut rng, 4..=50, 1_000_000);
        let t = ConvergentTable::new(&word(a.clone()));
        for l in 0..=a.len() as i64 {
            let det = t.p(l - 1) * t.q(l) - t.p(l) * t.q(l - 1);
            ensure(det.abs().is_one(), || format!("determinant, word {i}, l = {l}"))?;
        }
        for l in 1..a.len() - 2 {
            let b = check_approx_bound_with(&t, l).map_err(|e| format!("word {i}, l = {l}: {e}"))?;
            ensure(b.holds && b.margin.is_positive(), || {
                format!("approximation bound, word {i}, l = {l}")
            })?;
            checks += 1;
        }
        for l in 1..a.len() {
            for h in 1..=a.len() - l {
                ensure(check_growth_bound_with(&t, l, h).map_err(|e| e.to_string())?, || {
                    format!("growth bound, word {i}, l = {l}, h = {h}")
                })?;
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} strict bounds"))
}

fn quadratic_approximants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..100 {
        let w = random_word(&mut rng, 0..=6, 5);
        let period_len = rng.gen_range(1..=6);
        let u_len = rng.gen_range(1..=period_len);
        let uv: Vec<u64> = (0..period_len).map(|_| rng.gen_range(1..=5)).collect();
        let qa = periodic_value(&word(w.clone()), &word(uv.clone())).map_err(|e| e.to_string())?;

        // 200-term truncation of the periodic expansion, evaluated backward
        let expansion: Vec<u64> = (0..200)
            .map(|k| if k < w.len() { w[k] } else { uv[(k - w.len()) % uv.len()] })
            .collect();
        let trunc = RationalInterval::new(backward(&expansion), backward(&expansion[..199]));
        ensure(trunc.intersect(qa.root()).is_some(), || format!("pair {i}: root outside truncation"))?;
        ensure(qa.eval(&trunc).contains_zero(), || format!("pair {i}: no sign change"))?;
        ensure(qa.height_bound_holds(), || format!("pair {i}: height"))?;

        // alpha = W U V U followed by a random tail; the witness is (W, U, V)
        let u = &uv[..u_len];
        let v = &uv[u_len..];
        let mut alpha: Vec<u64> = w.iter().chain(u).chain(v).chain(u).copied().collect();
        alpha.extend((0..40).map(|_| rng.gen_range(1..=5)));
        let src = word(alpha);
        let wit = Witness::new(WitnessKind::Repeat, word(w.clone()), word(u.to_vec()), word(v.to_vec()));
        let rec = verify_repeat(&src, &wit, 16).map_err(|e| format!("pair {i}: {e}"))?;
        for id in ["approximant_distance", "height"] {
            let b = rec.bound(id).ok_or_else(|| format!("missing {id}"))?;
            ensure(b.decision == Decision::Pass, || format!("pair {i}: {id} is {:?}", b.decision))?;
        }
    }
    Ok("100 pairs".into())
}

fn low_complexity_word(rng: &mut ChaCha8Rng, len: usize) -> FiniteWord {
    match rng.gen_range(0..4) {
        // Sturmian coding of a random rotation, in exact arithmetic
        0 => {
            let den = rng.gen_range(1000..100_000i64);
            let slope = rat(rng.gen_range(1..den), den);
            let start = rat(rng.gen_range(0..den), den);
            let letters = (1..=len as i64)
                .map(|n| {
                    let x = &start + &slope * BigRational::from_integer(n.into());
                    let y = &start + &slope * BigRational::from_integer((n - 1).into());
                    1 + (x.floor() - y.floor()).to_integer().try_into().unwrap_or(0u64)
                })
                .collect();
            word(letters)
        }
        1 => {
            let states = rng.gen_range(1..=3);
            let transitions = (0..states)
                .map(|_| (0..2).map(|_| rng.gen_range(0..states)).collect())
                .collect();
            let outputs = (0..states).map(|_| rng.gen_range(1..=4)).collect();
            Dfao::new(2, 0, transitions, outputs).unwrap().prefix(len)
        }
        2 => {
            let pre = random_word(rng, 0..=4, 4);
            let per = random_word(rng, 1..=6, 4);
            EventuallyPeriodic::new(word(pre), word(per)).unwrap().prefix(len).unwrap()
        }
        _ => {
            let mut x = random_word(rng, 1..=3, 3);
            while x.len() < len {
                let mid = random_word(rng, 0..=2, 3);
                let rev: Vec<u64> = x.iter().rev().copied().collect();
                x = x.iter().chain(&mid).chain(&rev).copied().collect();
            }
            word(x[..len].to_vec())
        }
    }
}

fn pigeonhole_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut tested = 0;
    let mut attempts = 0;
    while tested < 500 {
        attempts += 1;
        ensure(attempts < 50_000, || format!("only {tested} qualifying words found"))?;
        let c = rng.gen_range(2..=4usize);
        let n = rng.gen_range(3..=60usize);
        let prefix = low_complexity_word(&mut rng, (c + 1) * n);
        if complexity(&prefix, n).map_err(|e| e.to_string())? > c * n {
            continue;
        }
        tested += 1;
        let got = pigeonhole_extract(&prefix, n, c).map_err(|e| format!("n = {n}, c = {c}: {e}"))?;
        let (w, u, v) = got.witness.lengths();
        ensure(w + v <= (3 * c + 1) * u, || format!("ratio bound, n = {n}, c = {c}"))?;
        ensure(3 * u >= n, || format!("|U| < n/3, n = {n}, c = {c}"))?;
        ensure(got.witness.reconstruct() == prefix.prefix(got.witness.prefix_len), || {
            format!("reconstruction, n = {n}, c = {c}")
        })?;
    }
    Ok(format!("{tested} words"))
}

fn automatic_chains() -> Outcome {
    let mut lens = Vec::new();
    for (name, dfao) in [("thue_morse", Dfao::thue_morse()), ("period_doubling", Dfao::period_doubling())] {
        let chain = detect_chain(&dfao, SearchKind::Either, 4096, &rat(16, 1)).map_err(|e| e.to_string())?;
        ensure(chain.len() >= 5, || format!("{name}: chain of length {}", chain.len()))?;
        ensure(chain.witnesses.windows(2).all(|p| p[0].u.len() < p[1].u.len()), || {
            format!("{name}: |U| not increasing")
        })?;
        let prefix = dfao.prefix(4096);
        ensure(chain.witnesses.iter().all(|w| w.holds_in(&prefix)), || format!("{name}: bad witness"))?;
        lens.push(format!("{name} {}", chain.len()));
    }
    Ok(lens.join(", "))
}

fn mirror_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut fits = Vec::new();
    for i in 0..50 {
        let mut x = random_word(&mut rng, 1..=3, 3);
        let mut stages = Vec::new();
        while x.len() < 600 {
            // palindromic V keeps every stage a palindrome
            let mut v = random_word(&mut rng, 0..=2, 3);
            let back: Vec<u64> = v.iter().rev().skip(v.len() % 2).copied().collect();
            v.extend(back);
            stages.push((x.clone(), v.clone()));
            let rev: Vec<u64> = x.iter().rev().copied().collect();
            x = x.iter().chain(&v).chain(&rev).copied().collect();
        }
        let src = word(x);
        let mut records = Vec::new();
        for (u, v) in stages.iter().skip(1) {
            let wit = Witness::new(WitnessKind::Mirror, FiniteWord::empty(), word(u.clone()), word(v.clone()));
            if wit.prefix_len + 16 > src.len() {
                break;
            }
            let rec = verify_mirror(&src, &wit, 16).map_err(|e| format!("prefix {i}: {e}"))?;
            for b in &rec.bounds {
                ensure(b.decision == Decision::Pass, || format!("prefix {i}, |U| = {}: {} is {:?}", u.len(), b.id, b.decision))?;
            }
            records.push(rec);
        }
        ensure(records.len() >= 3, || format!("prefix {i}: only {} witnesses", records.len()))?;
        for pair in records.windows(2) {
            ensure(pair[1].forms.product.hi() < pair[0].forms.product.hi(), || {
                format!("prefix {i}: product does not decrease at |U| = {}", pair[1].u)
            })?;
        }
        let eps = exponent_fit(&records).map_err(|e| format!("prefix {i}: {e}"))?;
        ensure(eps > 0.0, || format!("prefix {i}: fitted exponent {eps}"))?;
        fits.push(eps);
    }
    let min = fits.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(format!("50 prefixes, smallest fitted exponent {min:.3}"))
}

fn quasi_periodic_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut bounded = 0;
    for i in 0..20 {
        let eps = [rat(1, 4), rat(1, 2), rat(1, 1)][i % 3].clone();
        let factor = BigRational::one() + &eps;
        let mut lambda: u64 = rng.gen_range(3..=5);
        let mut r = 1;
        let mut blocks = Vec::new();
        for _ in 0..5 {
            r = rng.gen_range(r..=r + 1).min(4);
            let mut block = random_word(&mut rng, r..=r, 4);
            if block.iter().all(|&x| x == block[0]) {
                block[0] = block[0] % 4 + 1;
            }
            blocks.push(QuasiBlock { block: word(block), lambda });
            let next = (&factor * BigRational::from_integer(lambda.into())).ceil().to_integer();
            lambda = u64::try_from(next).unwrap() + rng.gen_range(0..=2);
        }
        let spec = QuasiPeriodicSpec::new(word(random_word(&mut rng, 0..=3, 4)), blocks)
            .map_err(|e| e.to_string())?;
        let report = quasi_periodic_witnesses(&spec, &eps).map_err(|e| e.to_string())?;
        ensure(report.growth_start.is_some(), || format!("spec {i}: growth never starts"))?;
        for e in &report.entries {
            ensure(e.square_prefix, || format!("spec {i}, k = {}: prefix is not W U U", e.k))?;
            ensure(e.u_lower_bounds, || format!("spec {i}, k = {}: |U| lower bound", e.k))?;
            ensure(4 * e.u_len as u64 >= e.lambda_k * e.r_k as u64, || format!("spec {i}, k = {}", e.k))?;
            if let Some(b) = &e.w_bound {
                let final_bound = BigRational::from_integer(BigInt::from(2 * e.r_k as u64 * e.lambda_k)) / &eps;
                ensure(b.holds && b.final_bound == final_bound, || format!("spec {i}, k = {}: |W| bound", e.k))?;
                ensure(BigRational::from_integer(e.w_len.into()) <= final_bound, || {
                    format!("spec {i}, k = {}: |W| exceeds bound", e.k)
                })?;
                bounded += 1;
            }
        }
    }
    ensure(bounded > 0, || "no entry met the |W| preconditions".into())?;
    Ok(format!("20 specs, {bounded} |W| bounds checked"))
}

fn fixtures() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    out.sort();
    out
}

fn refinement_monotonicity() -> Outcome {
    let mut compared = 0;
    for path in fixtures() {
        let loaded = spec::load(&path).map_err(|e| e.to_string())?;
        let source = loaded.sequence.source();
        let scan = source.available().map_or(512, |a| a.min(512) - 1);
        let chain = detect_chain(source, SearchKind::Either, scan, &rat(16, 1)).map_err(|e| e.to_string())?;
        for w in &chain.witnesses {
            let room = source.available().map_or(usize::MAX, |a| a - w.prefix_len);
            let mut g = 1;
            while 2 * g <= room.min(64) {
                let opts = |guard_depth| VerifyOptions { guard_depth, bit_limit: None };
                let shallow = verify(source, w, &opts(g)).map_err(|e| e.to_string())?;
                let deep = verify(source, w, &opts(2 * g)).map_err(|e| e.to_string())?;
                for (a, b) in shallow.bounds.iter().zip(&deep.bounds) {
                    if a.decision != Decision::Indeterminate {
                        ensure(a.decision == b.decision, || {
                            format!("{}: {} flipped between guard {g} and {}", path.display(), a.id, 2 * g)
                        })?;
                    }
                    compared += 1;
                }
                g *= 2;
            }
        }
    }
    Ok(format!("{compared} flag pairs"))
}

fn run_all(path: &Path) -> Result<(i32, Vec<u8>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_cfw"))
        .args(["all", "--spec", path.to_str().unwrap(), "--max-len", "256"])
        .env_remove(cfw::BITS_ENV)
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), out.stdout))
}

fn determinism() -> Outcome {
    let mut bytes = 0;
    for path in fixtures() {
        let (c1, first) = run_all(&path)?;
        let (c2, second) = run_all(&path)?;
        ensure(c1 == c2 && first == second, || format!("{} differs between runs", path.display()))?;
        ensure(!first.is_empty(), || format!("{}: empty report (exit {c1})", path.display()))?;
        bytes += first.len();
    }
    Ok(format!("{bytes} bytes compared"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 mirror formula identity", Duration::from_secs(10), mirror_identity),
        ("2 approximation, growth and determinant", Duration::from_secs(10), classical_bounds),
        ("3 quadratic approximants", Duration::from_secs(30), quadratic_approximants),
        ("4 pigeonhole extraction", Duration::from_secs(30), pigeonhole_suite),
        ("5 automatic sequence chains", Duration::from_secs(60), automatic_chains),
        ("6 quasi-palindromic mirror chains", Duration::from_secs(60), mirror_suite),
        ("7 quasi-periodic witnesses", Duration::from_secs(30), quasi_periodic_suite),
        ("8 refinement monotonicity", Duration::MAX, refinement_monotonicity),
        ("9 determinism", Duration::MAX, determinism),
    ];
    let mut failed = 0;
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let line = match result {
            Ok(detail) if elapsed <= limit => format!("PASS {name} ({detail}; {:.2}s)", elapsed.as_secs_f64()),
            Ok(detail) => format!("FAIL {name} ({detail}; {:.2}s over the {}s limit)", elapsed.as_secs_f64(), limit.as_secs()),
            Err(why) => format!("FAIL {name}: {why}"),
        };
        if line.starts_with("FAIL") {
            failed += 1;
        }
        println!("{line}");
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
