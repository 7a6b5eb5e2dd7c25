//! Acceptance gate. Prints one `criterion N: PASS|FAIL` line per criterion
//! and exits non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{gaussian_binomial_product, gf2_subspaces, mask_dim, subspace_mask, Gf2Family, RankTable};
use dimspread::certify::{certify_lower_bound, check_trace, rank_lower_bound, refute_spreading};
use dimspread::families::{
    measure_expansion, spreading_profile, verify_expander, verify_large_expansion, verify_spreading, word_length_for,
    MapFamily, SpreadingParams, Verdict,
};
use dimspread::format;
use dimspread::pipeline::{run_pipeline, PipelineOptions};
use dimspread::report;
use dimspread::subspace::{enumerate_subspaces, gaussian_binomial};
use dimspread::tensor::{
    min_spanning_rank_ones, tensor_rank_bruteforce, Decomposition, RankOneTerm, SpanSearch, Tensor3, TensorRank,
};
use dimspread::{Budgets, Config, Error, FieldSpec, Matrix, Mode, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let took = start.elapsed();
    if took > limit {
        return Err(format!("took {took:.2?}, limit {limit:?}"));
    }
    Ok(())
}

fn gf2(rows: &[&[u32]]) -> Matrix {
    Matrix::from_rows(FieldSpec::GF2, rows).unwrap()
}

fn random_tensor(rng: &mut ChaCha8Rng, field: FieldSpec, dims: (usize, usize, usize)) -> Tensor3 {
    let data = (0..dims.0 * dims.1 * dims.2).map(|_| rng.gen_range(0..field.modulus())).collect();
    Tensor3::new(field, dims, data).unwrap()
}

fn exact_rank(t: &Tensor3, r_max: usize, cfg: &Config) -> Result<Option<(usize, Decomposition)>, String> {
    match tensor_rank_bruteforce(t, r_max, cfg).map_err(|e| e.to_string())? {
        TensorRank::Exact { rank, decomposition } => {
            if decomposition.eval() != *t || decomposition.len() != rank {
                return Err("decomposition does not evaluate to the tensor".into());
            }
            Ok(Some((rank, decomposition)))
        }
        TensorRank::AboveMax { .. } => Ok(None),
    }
}

fn criterion_1(cfg: &Config) -> Outcome {
    let start = Instant::now();
    let n = gf2(&[&[0, 1], &[0, 0]]);
    let fam = MapFamily::new(FieldSpec::GF2, 2, vec![Matrix::identity(FieldSpec::GF2, 2), n.clone(), n.transpose()])
        .map_err(|e| e.to_string())?;
    let params = SpreadingParams::new(1, 2);
    let v = verify_spreading(&fam, params, Mode::Exhaustive, cfg).map_err(|e| e.to_string())?;
    if !matches!(v, Verdict::Holds(c) if c.is_conclusive()) {
        return Err(format!("spreading not verified exhaustively: {v:?}"));
    }
    let cert = certify_lower_bound(&fam, params, Mode::Exhaustive, cfg).map_err(|e| e.to_string())?;
    if cert.bound != 3 {
        return Err(format!("bound {} != 3", cert.bound));
    }
    let (rank, _) = exact_rank(&Tensor3::from_family(&fam), 4, cfg)?.ok_or("rank above 4")?;
    if rank != 3 {
        return Err(format!("rank {rank} != 3"));
    }
    within(Duration::from_secs(1), start)?;
    Ok(format!("bound 3, rank 3 with verified decomposition, {:.2?}", start.elapsed()))
}

fn criterion_2(cfg: &Config) -> Outcome {
    let start = Instant::now();
    let mut pairs = 0;
    let mut above = 0;
    let families = 120u64;
    for seed in 0..families {
        let d = 1 + (seed % 3) as usize;
        let fam = MapFamily::random(FieldSpec::GF2, 3, d, 20_000 + seed).map_err(|e| e.to_string())?;
        let profile = spreading_profile(&fam, Mode::Exhaustive, cfg).map_err(|e| e.to_string())?;
        if !profile.confidence.is_conclusive() {
            return Err("profile not exhaustive".into());
        }
        if profile.entries != Gf2Family::new(&fam).profile() {
            return Err(format!("seed {seed}: profile disagrees with oracle"));
        }
        let rank = match exact_rank(&Tensor3::from_family(&fam), 6, cfg)? {
            Some((r, _)) => r,
            None => {
                above += 1;
                7
            }
        };
        for &(s, t_max) in &profile.entries {
            for t in 1..=t_max {
                pairs += 1;
                let bound = rank_lower_bound(3, SpreadingParams::new(s, t));
                if rank < bound {
                    return Err(format!("seed {seed}: rank {rank} < n+t-s = {bound} at (s,t)=({s},{t})"));
                }
            }
        }
    }
    within(Duration::from_secs(600), start)?;
    Ok(format!(
        "{families} families, {pairs} certified (s,t) pairs, 0 violations ({above} with rank > 6), {:.2?}",
        start.elapsed()
    ))
}

fn criterion_3(cfg: &Config) -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for (p, dims) in [(2u32, (2, 2, 2)), (2, (3, 2, 2)), (3, (2, 2, 2)), (3, (3, 2, 2))] {
        let field = FieldSpec::new(p as u64).unwrap();
        let table = RankTable::build(p, dims);
        let mut rng = ChaCha8Rng::seed_from_u64(300 + p as u64 * 10 + dims.0 as u64);
        for _ in 0..20 {
            let t = random_tensor(&mut rng, field, dims);
            let expected = table.rank_of(&t);
            match min_spanning_rank_ones(&t.slices(), 8, cfg).map_err(|e| e.to_string())? {
                SpanSearch::Found { rank, .. } if rank == expected => {}
                other => return Err(format!("GF({p}) {dims:?}: span search {other:?}, oracle rank {expected}")),
            }
            checked += 1;
        }
    }
    within(Duration::from_secs(300), start)?;
    Ok(format!("{checked} tensors equal to the BFS oracle, {:.2?}", start.elapsed()))
}

fn criterion_4(cfg: &Config) -> Outcome {
    let start = Instant::now();
    let mut pairs = [0usize; 2];
    for seed in 0..200u64 {
        if pairs.iter().all(|&c| c >= 20) {
            break;
        }
        let n = 2 + (seed % 2) as usize;
        let fam = MapFamily::random(FieldSpec::GF2, n, 1 + (seed % 3) as usize, 40_000 + seed)
            .map_err(|e| e.to_string())?;
        let Some((rank, dec)) = exact_rank(&Tensor3::from_family(&fam), 9, cfg)? else {
            continue;
        };
        let oracle = Gf2Family::new(&fam);
        for s in 1..=n {
            for t in 1..=n {
                let params = SpreadingParams::new(s, t);
                if rank >= rank_lower_bound(n, params) {
                    continue;
                }
                let trace = refute_spreading(&fam, &dec, params).map_err(|e| format!("seed {seed}: {e}"))?;
                if !check_trace(&fam, params, &trace) {
                    return Err(format!("seed {seed}: check_trace rejected ({s},{t})"));
                }
                let achieved = fam.image_sum(&trace.violating).map_err(|e| e.to_string())?.dim();
                if achieved >= t || oracle.image_dim(subspace_mask(&trace.violating)) >= t {
                    return Err(format!("seed {seed}: violating subspace spreads"));
                }
                if verify_spreading(&fam, params, Mode::Exhaustive, cfg).map_err(|e| e.to_string())?.holds() {
                    return Err(format!("seed {seed}: verify_spreading holds at ({s},{t})"));
                }
                pairs[n - 2] += 1;
            }
        }
    }
    if pairs[0] + pairs[1] < 25 || pairs.contains(&0) {
        return Err(format!("only {pairs:?} pairs found"));
    }
    within(Duration::from_secs(300), start)?;
    Ok(format!(
        "{} pairs over GF(2)^2, {} over GF(2)^3, 0 failures, {:.2?}",
        pairs[0],
        pairs[1],
        start.elapsed()
    ))
}

fn criterion_5(cfg: &Config) -> Outcome {
    let start = Instant::now();
    let subs: Vec<u64> = gf2_subspaces(4).into_iter().filter(|&m| mask_dim(m) == 3).collect();
    let mut families = 0;
    let mut seed = 0u64;
    while families < 24 {
        if seed > 2000 {
            return Err(format!("only {families} families with tau* > 0"));
        }
        let fam = MapFamily::random(FieldSpec::GF2, 4, 1 + (seed % 3) as usize, 50_000 + seed)
            .map_err(|e| e.to_string())?
            .symmetrize();
        seed += 1;
        let tau = measure_expansion(&fam, Mode::Exhaustive, cfg).map_err(|e| e.to_string())?.tau_star;
        if tau <= Rational::from_integer(0) {
            continue;
        }
        families += 1;
        let required = (Rational::from_integer(1) + tau * Rational::new(1, 4) / Rational::from_integer(2)) * Rational::from_integer(3);
        let oracle = Gf2Family::new(&fam);
        for &m in &subs {
            let achieved = Rational::from_integer(oracle.image_dim(m) as i64);
            if achieved < required {
                return Err(format!("seed {}: dim {achieved} < {required} with tau* = {tau}", seed - 1));
            }
        }
        let rep = verify_large_expansion(&fam, tau, cfg).map_err(|e| e.to_string())?;
        if !rep.verdict.holds() || !rep.expander_checked {
            return Err(format!("seed {}: library check disagrees", seed - 1));
        }
    }
    within(Duration::from_secs(120), start)?;
    Ok(format!(
        "{families} families, {} dim-3 subspaces each, 0 violations, {:.2?}",
        subs.len(),
        start.elapsed()
    ))
}

fn criterion_6(cfg: &Config) -> Outcome {
    let start = Instant::now();
    let eps = Rational::new(1, 2);
    let (mut checked, mut skipped) = (0, Vec::new());
    for n in 2..=4usize {
        let mut found = 0;
        for seed in 0..400u64 {
            if found == 6 {
                break;
            }
            let fam = MapFamily::random(FieldSpec::GF2, n, 1 + (seed % 2) as usize, 60_000 + 1000 * n as u64 + seed)
                .map_err(|e| e.to_string())?
                .symmetrize();
            let tau = measure_expansion(&fam, Mode::Exhaustive, cfg).map_err(|e| e.to_string())?.tau_star;
            if tau <= Rational::from_integer(0) {
                continue;
            }
            match verify_expander(&fam, tau, Mode::Exhaustive, cfg).map_err(|e| e.to_string())? {
                Verdict::Holds(c) if c.is_conclusive() => {}
                v => return Err(format!("n={n} seed {seed}: tau* = {tau} not certified: {v:?}")),
            }
            found += 1;
            let t = word_length_for(eps, tau).map_err(|e| e.to_string())? as usize;
            let params = SpreadingParams::from_epsilon(eps, n).map_err(|e| e.to_string())?;
            let words = match fam.words(t, &cfg.budgets) {
                Ok(w) => w,
                Err(Error::BudgetExceeded { .. }) => {
                    let d = fam.len() as f64;
                    let feasible = (cfg.budgets.word_cap as f64).log(d).floor() as usize;
                    skipped.push(format!("n={n} D={} t={t} (largest feasible t={feasible})", fam.len()));
                    continue;
                }
                Err(e) => return Err(e.to_string()),
            };
            let v = verify_spreading(&words, params, Mode::Exhaustive, cfg).map_err(|e| e.to_string())?;
            let oracle_min = Gf2Family::new(&words).profile()[params.s - 1].1;
            if !v.holds() || oracle_min < params.t {
                return Err(format!("n={n} seed {seed}: words of length {t} not ({},{})-spreading", params.s, params.t));
            }
            checked += 1;
        }
        if found == 0 {
            return Err(format!("no expander found for n={n}"));
        }
    }
    if checked == 0 {
        return Err("every case skipped".into());
    }
    let skip_note = if skipped.is_empty() {
        String::new()
    } else {
        format!("; skipped: {}", skipped.join(", "))
    };
    Ok(format!("{checked} verified, {} skipped, 0 violations{skip_note}, {:.2?}", skipped.len(), start.elapsed()))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    for p in [2u64, 3] {
        let field = FieldSpec::new(p).unwrap();
        for n in 0..=5usize {
            for s in 0..=n {
                let expected = gaussian_binomial_product(n as u32, s as u32, p as u128);
                let counted = enumerate_subspaces(field, n, s, u128::MAX).map_err(|e| e.to_string())?.count() as u128;
                let formula = gaussian_binomial(n, s, p).ok_or("overflow")?;
                if counted != expected || formula != expected {
                    return Err(format!("GF({p}) n={n} s={s}: counted {counted}, q-Pascal {formula}, product {expected}"));
                }
                cases += 1;
            }
        }
    }
    let stretch = enumerate_subspaces(FieldSpec::GF2, 6, 3, u128::MAX).map_err(|e| e.to_string())?.count();
    if stretch != 1395 {
        return Err(format!("[6 choose 3]_2 counted {stretch} != 1395"));
    }
    within(Duration::from_secs(60), start)?;
    Ok(format!("{cases} (n,s,p) cases plus [6,3]_2 = 1395, {:.2?}", start.elapsed()))
}

fn random_field(rng: &mut ChaCha8Rng) -> FieldSpec {
    FieldSpec::new([2u64, 3, 5, 7, 251, 65521][rng.gen_range(0..6)]).unwrap()
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..1000 {
        let field = random_field(&mut rng);
        let n = rng.gen_range(1..=5);
        let d = rng.gen_range(1..=4);
        let fam = MapFamily::random(field, n, d, rng.gen()).map_err(|e| e.to_string())?;
        let text = format::write_maps(&fam);
        let back = format::parse_maps(&text).map_err(|e| format!("maps #{i}: {e}"))?;
        if back != fam || format::write_maps(&back) != text {
            return Err(format!("maps #{i} changed on round trip"));
        }

        let dims = (rng.gen_range(0..=4), rng.gen_range(0..=4), rng.gen_range(0..=4));
        let t = random_tensor(&mut rng, field, dims);
        let text = format::write_tensor(&t);
        let back = format::parse_tensor(&text).map_err(|e| format!("t3 #{i}: {e}"))?;
        if back != t || format::write_tensor(&back) != text {
            return Err(format!("t3 #{i} changed on round trip"));
        }

        let dims = (rng.gen_range(1..=4), rng.gen_range(1..=4), rng.gen_range(1..=4));
        let p = field.modulus();
        let mut vec = |len: usize| (0..len).map(|_| rng.gen_range(0..p)).collect::<Vec<u32>>();
        let terms = (0..i % 6).map(|_| RankOneTerm::new(vec(dims.0), vec(dims.1), vec(dims.2))).collect();
        let dec = Decomposition::new(field, dims, terms).map_err(|e| e.to_string())?;
        let text = format::write_decomposition(&dec);
        let back = format::parse_decomposition(&text).map_err(|e| format!("dec #{i}: {e}"))?;
        if back != dec || format::write_decomposition(&back) != text {
            return Err(format!("dec #{i} changed on round trip"));
        }
    }
    Ok("1000 round trips each of .maps, .t3, .dec byte-identical".into())
}

fn corpus_reports(cfg: &Config) -> String {
    let mut out = String::new();
    let show = |r: Result<String, Error>| r.unwrap_or_else(|e| format!("error: {e}\n"));
    for seed in 0..6u64 {
        let (field, n) = if seed % 2 == 0 { (FieldSpec::GF2, 2 + seed as usize / 2) } else { (FieldSpec::GF3, 3) };
        let fam = MapFamily::random(field, n, 1 + seed as usize % 3, 90_000 + seed).unwrap();
        for mode in [Mode::Exhaustive, Mode::Sampled { count: 25, seed }] {
            out += &format!("== family {seed} {mode}\n");
            let opts = PipelineOptions::new(Rational::new(1, 2), mode);
            out += &show(run_pipeline(&fam, opts, cfg).map(|r| r.render()));
            let params = SpreadingParams::from_epsilon(Rational::new(1, 3), n).unwrap();
            out += &show(verify_spreading(&fam, params, mode, cfg).map(|v| report::verdict(&v)));
            out += &show(verify_expander(&fam, Rational::new(1, 2), mode, cfg).map(|v| report::verdict(&v)));
            out += &show(measure_expansion(&fam, mode, cfg).map(|r| report::expansion(&r)));
            out += &show(spreading_profile(&fam, mode, cfg).map(|p| report::profile(&p, n)));
        }
        if field == FieldSpec::GF2 && n <= 3 {
            let t = Tensor3::from_family(&fam);
            out += &show(tensor_rank_bruteforce(&t, 9, cfg).map(|r| format!("{r:?}\n")));
        }
    }
    out
}

fn criterion_9() -> Outcome {
    let one = corpus_reports(&Config::with_budgets(1, Budgets::default()));
    let eight = corpus_reports(&Config::with_budgets(8, Budgets::default()));
    if one != eight {
        let line = one.lines().zip(eight.lines()).position(|(a, b)| a != b).unwrap_or(0);
        return Err(format!("reports differ first at line {}", line + 1));
    }
    Ok(format!("{} report bytes identical with 1 and 8 threads", one.len()))
}

fn main() -> ExitCode {
    let cfg = Config::new(std::thread::available_parallelism().map_or(4, |n| n.get()));
    let criteria: Vec<(u32, Box<dyn Fn() -> Outcome>)> = vec![
        (1, Box::new(|| criterion_1(&cfg))),
        (2, Box::new(|| criterion_2(&cfg))),
        (3, Box::new(|| criterion_3(&cfg))),
        (4, Box::new(|| criterion_4(&cfg))),
        (5, Box::new(|| criterion_5(&cfg))),
        (6, Box::new(|| criterion_6(&cfg))),
        (7, Box::new(criterion_7)),
        (8, Box::new(criterion_8)),
        (9, Box::new(criterion_9)),
    ];
    let mut failed = 0;
    for (id, run) in &criteria {
        match run() {
            Ok(detail) => println!("criterion {id}: PASS ({detail})"),
            Err(why) => {
                failed += 1;
                println!("criterion {id}: FAIL ({why})");
            }
        }
    }
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
