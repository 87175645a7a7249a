//! Suite runners: seeded random instances plus the fixed golden cases,
//! each check reduced to a `Record` (cap violations become failed records,
//! not crashes).

use crate::report::{CsvTable, Record};
use poissonization::algebra::{modular_flow, Algebra, AlgebraElement, Weight};
use poissonization::channels::{
    check_weight_preserving, corner_project_oracle_residual, independence_check, lift_on_words,
    LinearMapOnAlgebra,
};
use poissonization::entropy::{lindblad_entropy, poisson_entropy_report, poisson_relative_entropy};
use poissonization::fixtures::{
    corner_pair, dominated_weight_pair, faithful_weight, hermitian_contraction, random_element,
    rng,
};
use poissonization::fock::{
    basis_transform_round_trip, fock_action_residual, fock_isometry_check, gram_empty, gram_fock,
};
use poissonization::gns::{adaptive_cap, GnsContext, PoissonWord, WordKind};
use poissonization::modular::{
    classify_type, flow_gram_invariance, kms_residual, principal_series_lambda,
    principal_series_weight, TypeClass,
};
use poissonization::moments::{
    bernoulli_moment, characteristic, classical_pmf, growth_bound_check, poisson_moment,
    MomentQuery,
};
use poissonization::partitions::{bell, permanent};
use rand::Rng;

/// Effective parameters of one suite run.
#[derive(Clone, Debug)]
pub struct SuiteParams {
    pub seed: u64,
    pub dims: Vec<usize>,
    pub mass: f64,
    pub word_cap: usize,
    pub gns_cap: usize,
    pub tolerance: f64,
    pub levels: (usize, usize, usize),
    pub samples: usize,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            seed: 0,
            dims: vec![2],
            mass: 1.0,
            word_cap: 4,
            gns_cap: 12,
            tolerance: 1e-8,
            levels: (5, 30, 5),
            samples: 20,
        }
    }
}

pub const SUITES: [&str; 10] = [
    "moments",
    "gram",
    "fock",
    "kms",
    "classify",
    "channels",
    "independence",
    "entropy",
    "bernoulli",
    "classical",
];

pub fn run_suite(name: &str, p: &SuiteParams) -> Option<(Vec<Record>, Option<CsvTable>)> {
    match name {
        "classical" => Some(classical_suite(p)),
        "moments" => Some(moments_suite(p)),
        "bernoulli" => Some(bernoulli_suite(p)),
        "gram" => Some(gram_suite(p)),
        "fock" => Some(fock_suite(p)),
        "kms" => Some(kms_suite(p)),
        "classify" => Some(classify_suite(p)),
        "channels" => Some(channels_suite(p)),
        "independence" => Some(independence_suite(p)),
        "entropy" => Some(entropy_suite(p)),
        _ => None,
    }
}

fn algebra(p: &SuiteParams) -> Algebra {
    Algebra::new(p.dims.clone()).unwrap_or_else(|_| Algebra::full(2))
}

fn classical_suite(p: &SuiteParams) -> (Vec<Record>, Option<CsvTable>) {
    let mut records = Vec::new();
    let mut table = CsvTable { header: vec!["lambda".into(), "k".into(), "pmf".into()], rows: vec![] };
    for &lam in &[0.5, 1.7, 4.0, p.mass] {
        let mut worst = 0.0f64;
        let mut fact = 1.0f64;
        for k in 0..=20u32 {
            if k > 0 {
                fact *= k as f64;
            }
            let got = classical_pmf(lam, k).unwrap();
            let direct = (-lam).exp() * lam.powi(k as i32) / fact;
            worst = worst.max((got - direct).abs());
            table.rows.push(vec![lam, k as f64, got]);
        }
        records.push(Record::bound_check(format!("pmf-direct λ={lam}"), worst, 1e-12));
        let total: f64 = (0..=40).map(|k| classical_pmf(lam, k).unwrap()).sum();
        records.push(Record::residual_check(format!("pmf-normalized λ={lam}"), total, 1.0, 1e-13));
        // GNS vacuum level weights
        let w = Weight::diagonal(&[lam]).unwrap();
        let ctx = GnsContext::new(&w);
        match ctx.vacuum(21) {
            Ok(xi) => {
                let levels = ctx.inner_levels(&xi, &xi);
                let worst = (0..=20)
                    .map(|k| (levels[k].re - classical_pmf(lam, k as u32).unwrap()).abs())
                    .fold(0.0f64, f64::max);
                records.push(Record::bound_check(format!("pmf-gns λ={lam}"), worst, 1e-12));
            }
            Err(e) => records.push(Record::failure(format!("pmf-gns λ={lam}"), &e.to_string())),
        }
    }
    (records, Some(table))
}

fn moments_suite(p: &SuiteParams) -> (Vec<Record>, Option<CsvTable>) {
    let mut r = rng(p.seed);
    let mut records = Vec::new();
    // golden: scalar algebra, all letters the identity, n = 3 ⇒ B(3) = 5
    {
        let w = Weight::diagonal(&[1.0]).unwrap();
        let one = w.algebra().identity::<f64>();
        let v = poisson_moment(&MomentQuery::new(&w, vec![one.clone(), one.clone(), one]).unwrap())
            .unwrap();
        records.push(Record::residual_check("golden scalar-bell3", v.re, 5.0, 1e-12));
    }
    // golden: zero letters vanish beyond the empty word
    {
        let alg = algebra(p);
        let w = faithful_weight(&alg, p.mass, &mut r);
        let z = alg.zero::<f64>();
        let v = poisson_moment(&MomentQuery::new(&w, vec![z.clone(), z]).unwrap()).unwrap();
        records.push(Record::residual_check("golden zero-word", v.norm(), 0.0, 1e-15));
    }
    for trial in 0..p.samples {
        let alg = algebra(p);
        let w = faithful_weight(&alg, p.mass.min(1.0), &mut r);
        let n = 1 + trial % p.word_cap.max(1);
        let xs: Vec<AlgebraElement<f64>> =
            (0..n).map(|_| hermitian_contraction(&alg, &mut r)).collect();
        let closed = match poisson_moment(&MomentQuery::new(&w, xs.clone()).unwrap()) {
            Ok(v) => v,
            Err(e) => {
                records.push(Record::failure(format!("moment-{trial}"), &e.to_string()));
                continue;
            }
        };
        let check = (|| -> poissonization::Result<f64> {
            let cap = adaptive_cap(&w, p.tolerance, n, 1.0, alg.linear_dim())?;
            let ctx = GnsContext::new(&w);
            Ok((closed - ctx.moment_oracle(&xs, cap)?).norm())
        })();
        match check {
            Ok(residual) => {
                records.push(Record::bound_check(format!("moment-oracle-{trial}"), residual, p.tolerance))
            }
            Err(e) => records.push(Record::failure(format!("moment-oracle-{trial}"), &e.to_string())),
        }
        // growth bound alongside
        let g = growth_bound_check(&MomentQuery::new(&w, xs).unwrap()).unwrap();
        records.push(Record::bound_check(format!("growth-{trial}"), g.moment_abs, g.bound * (1.0 + 1e-12)));
    }
    // characteristic functional on Hermitian contractions
    for trial in 0..5 {
        let alg = algebra(p);
        let w = faithful_weight(&alg, p.mass.min(1.0), &mut r);
        let x = hermitian_contraction(&alg, &mut r);
        let closed = characteristic(&w, &x).unwrap();
        let check = (|| -> poissonization::Result<f64> {
            let cap = adaptive_cap(&w, p.tolerance, 0, 1.0, alg.linear_dim())?;
            let ctx = GnsContext::new(&w);
            let xi = ctx.vacuum(cap)?;
            let gxi = ctx.gamma_vacuum(&x.exp_i()?, cap)?;
            Ok((ctx.inner(&xi, &gxi) - closed).norm())
        })();
        match check {
            Ok(res) => records.push(Record::bound_check(format!("characteristic-{trial}"), res, p.tolerance)),
            Err(e) => records.push(Record::failure(format!("characteristic-{trial}"), &e.to_string())),
        }
    }
    (records, None)
}

fn bernoulli_suite(p: &SuiteParams) -> (Vec<Record>, Option<CsvTable>) {
    let mut r = rng(p.seed);
    let mut records = Vec::new();
    let mut table =
        CsvTable { header: vec!["trial".into(), "n_copies".into(), "error".into(), "ratio".into()], rows: vec![] };
    let mut done = 0usize;
    let mut attempts = 0usize;
    while done < p.samples && attempts < p.samples * 10 {
        attempts += 1;
        let alg = algebra(p);
        let w = faithful_weight(&alg, p.mass, &mut r);
        let n = 2 + done % 3;
        let xs: Vec<AlgebraElement<f64>> = (0..n).map(|_| random_element(&alg, &mut r)).collect();
        let q = MomentQuery::new(&w, xs).unwrap();
        let exact = poisson_moment(&q).unwrap();
        let ladder = [64u64, 128, 256, 512];
        let errs: Vec<f64> =
            ladder.iter().map(|&m| (bernoulli_moment(&q, m).unwrap() - exact).norm()).collect();
        if errs[0] < 1e-10 {
            continue;
        }
        done += 1;
        let mut prev = errs[0];
        table.rows.push(vec![done as f64, ladder[0] as f64, errs[0], f64::NAN]);
        for (i, (&m, &e)) in ladder.iter().zip(&errs).enumerate().skip(1) {
            let ratio = e / prev;
            table.rows.push(vec![done as f64, m as f64, e, ratio]);
            records.push(Record {
                name: format!("bernoulli-{done}-ratio-{i}"),
                computed: ratio,
                reference: 0.5,
                residual: (ratio - 0.5).abs(),
                pass: (0.4..=0.6).contains(&ratio),
            });
            prev = e;
        }
        // n = 1 words are exact at every n_copies
        let x1 = random_element(&alg, &mut r);
        let q1 = MomentQuery::new(&w, vec![x1.clone()]).unwrap();
        let exact1 = (bernoulli_moment(&q1, 1).unwrap() - w.eval(&x1).unwrap()).norm();
        records.push(Record::bound_check(format!("bernoulli-{done}-order1"), exact1, 1e-13));
    }
    (records, Some(table))
}

fn gram_suite(p: &SuiteParams) -> (Vec<Record>, Option<CsvTable>) {
    let mut r = rng(p.seed);
    let mut records = Vec::new();
    for trial in 0..p.samples {
        let alg = algebra(p);
        let w = faithful_weight(&alg, p.mass.min(1.0), &mut r);
        let ctx = GnsContext::new(&w);
        let n = 1 + trial % 3;
        let m = 1 + (trial / 2) % 3;
        let xs: Vec<AlgebraElement<f64>> =
            (0..n).map(|_| hermitian_contraction(&alg, &mut r)).collect();
        let ys: Vec<AlgebraElement<f64>> =
            (0..m).map(|_| hermitian_contraction(&alg, &mut r)).collect();
        let check = (|| -> poissonization::Result<f64> {
            let closed = gram_empty(&w, &xs, &ys)?;
            let cap = adaptive_cap(&w, p.tolerance, n + m, 1.0, alg.linear_dim())?;
            let u = ctx.build_word_vector(&PoissonWord::new(WordKind::LambdaEmpty, xs.clone())?, cap)?;
            let v = ctx.build_word_vector(&PoissonWord::new(WordKind::LambdaEmpty, ys.clone())?, cap)?;
            Ok((closed - ctx.inner(&u, &v)).norm())
        })();
        match check {
            Ok(res) => records.push(Record::bound_check(format!("empty-gram-{trial}"), res, p.tolerance)),
            Err(e) => records.push(Record::failure(format!("empty-gram-{trial}"), &e.to_string())),
        }
    }
    // mean-zero specialization reduces to the permanent
    for trial in 0..5 {
        let alg = algebra(p);
        let w = faithful_weight(&alg, p.mass, &mut r);
        let center = |x: &AlgebraElement<f64>| {
            let mean = w.eval(x).unwrap() / num_complex::Complex64::new(w.mass(), 0.0);
            x.sub(&alg.identity::<f64>().scale(mean))
        };
        let n = 1 + trial % 3;
        let xs: Vec<AlgebraElement<f64>> =
            (0..n).map(|_| center(&random_element(&alg, &mut r))).collect();
        let ys: Vec<AlgebraElement<f64>> =
            (0..n).map(|_| center(&random_element(&alg, &mut r))).collect();
        let pairing: Vec<Vec<num_complex::Complex64>> = xs
            .iter()
            .map(|x| ys.iter().map(|y| w.eval(&x.adjoint().mul(y)).unwrap()).collect())
            .collect();
        let res =
            (gram_empty(&w, &xs, &ys).unwrap() - permanent(&pairing).unwrap()).norm();
        records.push(Record::bound_check(format!("mean-zero-permanent-{trial}"), res, 1e-10));
    }
    (records, None)
}

fn fock_suite(p: &SuiteParams) -> (Vec<Record>, Option<CsvTable>) {
    let mut r = rng(p.seed);
    let mut records = Vec::new();
    let alg = algebra(p);
    for trial in 0..p.samples.min(12) {
        let w = faithful_weight(&alg, p.mass.min(1.0), &mut r);
        let ctx = GnsContext::new(&w);
        let n = 1 + trial % 3;
        let m = if trial % 4 == 0 { 1 + (n % 3) } else { n };
        let xs: Vec<AlgebraElement<f64>> =
            (0..n).map(|_| hermitian_contraction(&alg, &mut r)).collect();
        let ys: Vec<AlgebraElement<f64>> =
            (0..m).map(|_| hermitian_contraction(&alg, &mut r)).collect();
        let check = (|| -> poissonization::Result<f64> {
            let closed = gram_fock(&w, &xs, &ys)?;
            let cap = adaptive_cap(&w, p.tolerance, n + m, 1.0, alg.linear_dim())?;
            let u = ctx
                .build_word_vector(&PoissonWord::new(WordKind::LambdaEmptyEmpty, xs.clone())?, cap)?;
            let v = ctx
                .build_word_vector(&PoissonWord::new(WordKind::LambdaEmptyEmpty, ys.clone())?, cap)?;
            Ok((closed - ctx.inner(&u, &v)).norm())
        })();
        match check {
            Ok(res) => records.push(Record::bound_check(format!("fock-gram-{trial}"), res, p.tolerance)),
            Err(e) => records.push(Record::failure(format!("fock-gram-{trial}"), &e.to_string())),
        }
    }
    for len in 1..=4usize {
        let w = faithful_weight(&alg, p.mass, &mut r);
        let letters: Vec<AlgebraElement<f64>> =
            (0..len).map(|_| random_element(&alg, &mut r)).collect();
        let res = basis_transform_round_trip(&letters, &w).unwrap();
        records.push(Record::bound_check(format!("transform-roundtrip-{len}"), res, 1e-12));
    }
    for trial in 0..8 {
        let w = faithful_weight(&alg, p.mass.min(1.0), &mut r);
        let ctx = GnsContext::new(&w);
        let x = hermitian_contraction(&alg, &mut r);
        let ys: Vec<AlgebraElement<f64>> =
            (0..(trial % 3)).map(|_| hermitian_contraction(&alg, &mut r)).collect();
        match fock_action_residual(&ctx, &x, &ys, p.gns_cap) {
            Ok(res) => records.push(Record::bound_check(format!("fock-action-{trial}"), res, p.tolerance)),
            Err(e) => records.push(Record::failure(format!("fock-action-{trial}"), &e.to_string())),
        }
    }
    {
        let w = faithful_weight(&alg, p.mass, &mut r);
        let words: Vec<Vec<AlgebraElement<f64>>> = (0..5)
            .map(|k| (0..(k % 3 + 1)).map(|_| random_element(&alg, &mut r)).collect())
            .collect();
        match fock_isometry_check(&w, &words) {
            Ok(rep) => records.push(Record::bound_check("fock-isometry", rep.max_deviation, 1e-10)),
            Err(e) => records.push(Record::failure("fock-isometry", &e.to_string())),
        }
    }
    (records, None)
}

fn kms_suite(p: &SuiteParams) -> (Vec<Record>, Option<CsvTable>) {
    let mut r = rng(p.seed);
    let mut records = Vec::new();
    let alg = algebra(p);
    for trial in 0..p.samples {
        let w = faithful_weight(&alg, p.mass, &mut r);
        let x = hermitian_contraction(&alg, &mut r);
        let y = hermitian_contraction(&alg, &mut r);
        let t = r.gen_range(-1.5..1.5);
        match kms_residual(&w, &x, &y, t) {
            Ok(res) => records.push(Record::bound_check(format!("kms-{trial}"), res, p.tolerance)),
            Err(e) => records.push(Record::failure(format!("kms-{trial}"), &e.to_string())),
        }
    }
    for trial in 0..5 {
        let w = faithful_weight(&alg, p.mass, &mut r);
        let words: Vec<PoissonWord<f64>> = (0..3)
            .map(|_| {
                PoissonWord::new(
                    WordKind::LambdaEmpty,
                    vec![random_element(&alg, &mut r), random_element(&alg, &mut r)],
                )
                .unwrap()
            })
            .collect();
        let res = flow_gram_invariance(&words, &w, 0.7).unwrap();
        records.push(Record::bound_check(format!("flow-gram-{trial}"), res, 1e-9));
        let x = random_element(&alg, &mut r);
        let (t, s) = (r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
        let a = modular_flow(&w, &modular_flow(&w, &x, s).unwrap(), t).unwrap();
        let b = modular_flow(&w, &x, t + s).unwrap();
        records.push(Record::bound_check(format!("flow-group-{trial}"), a.sub(&b).max_abs(), 1e-12));
    }
    (records, None)
}

fn classify_suite(p: &SuiteParams) -> (Vec<Record>, Option<CsvTable>) {
    let mut records = Vec::new();
    let tracial = Weight::<f64>::tracial(&Algebra::full(3));
    records.push(Record::boolean(
        "tracial-II1",
        classify_type(&tracial).class == TypeClass::TypeII1,
    ));
    let half = Weight::diagonal(&[1.0, 0.5]).unwrap();
    match classify_type(&half).class {
        TypeClass::TypeIIIlambda(l) => {
            records.push(Record::residual_check("geometric-III-half", l, 0.5, 1e-12))
        }
        _ => records.push(Record::boolean("geometric-III-half", false)),
    }
    let dense = Weight::diagonal(&[1.0, 1.0f64.exp(), 2.0f64.sqrt().exp()]).unwrap();
    records.push(Record::boolean(
        "incommensurate-III1",
        classify_type(&dense).class == TypeClass::TypeIII1,
    ));
    let theta = 2.0 * std::f64::consts::PI;
    let mut r = rng(p.seed);
    for trial in 0..5 {
        let tn: f64 = r.gen_range(-0.5..0.5);
        let tm: f64 = r.gen_range(-0.5..0.5);
        let w = principal_series_weight(&[tn, tm], theta, &[1, 1]).unwrap();
        let expect = principal_series_lambda(tn, tm, theta);
        let got = match classify_type(&w).class {
            TypeClass::TypeIIIlambda(l) => l,
            TypeClass::TypeII1 => 1.0,
            _ => f64::NAN,
        };
        records.push(Record::residual_check(format!("principal-series-{trial}"), got, expect, 1e-12));
        // scale invariance: same class, λ equal to classifier tolerance
        let scaled = w.scaled(3.3).unwrap();
        let same = match (classify_type(&w).class, classify_type(&scaled).class) {
            (TypeClass::TypeIIIlambda(a), TypeClass::TypeIIIlambda(b)) => (a - b).abs() <= 1e-9,
            (a, b) => a == b,
        };
        records.push(Record::boolean(format!("scale-invariance-{trial}"), same));
    }
    (records, None)
}

fn channels_suite(p: &SuiteParams) -> (Vec<Record>, Option<CsvTable>) {
    let mut r = rng(p.seed);
    let mut records = Vec::new();
    for trial in 0..p.samples.min(8) {
        let d = 2 + trial % 2;
        let alg = Algebra::full(d);
        let entries: Vec<f64> = (0..d).map(|_| r.gen_range(0.2..1.0)).collect();
        let w = Weight::diagonal(&entries).unwrap();
        let mut u = alg.zero::<f64>();
        for i in 0..d {
            let th: f64 = r.gen_range(0.0..std::f64::consts::TAU);
            u.blocks[0][(i, i)] = num_complex::Complex64::new(th.cos(), th.sin());
        }
        let conj = match LinearMapOnAlgebra::unitary_conjugation(&alg, &u).with_weight_dual(&w, &w)
        {
            Ok(m) => m,
            Err(e) => {
                records.push(Record::failure(format!("conj-dual-{trial}"), &e.to_string()));
                continue;
            }
        };
        records.push(Record::bound_check(
            format!("preserve-{trial}"),
            check_weight_preserving(&conj, &w, &w).unwrap(),
            1e-10,
        ));
        let words: Vec<PoissonWord<f64>> = (0..2)
            .map(|_| {
                PoissonWord::new(
                    WordKind::LambdaEmpty,
                    vec![random_element(&alg, &mut r), random_element(&alg, &mut r)],
                )
                .unwrap()
            })
            .collect();
        let lifted: Vec<_> =
            words.iter().map(|wd| lift_on_words(&conj, wd, &w, &w).unwrap()).collect();
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                let before = gram_empty(&w, &words[i].letters, &words[j].letters).unwrap();
                let after = gram_empty(&w, &lifted[i].letters, &lifted[j].letters).unwrap();
                worst = worst.max((before - after).norm());
            }
        }
        records.push(Record::bound_check(format!("lift-gram-{trial}"), worst, 1e-9));
    }
    // corner projection against least squares
    for trial in 0..4 {
        let dim = 2 + trial % 2;
        let (w, e, _, _, _) = corner_pair(dim, &mut r);
        let ctx = GnsContext::new(&w);
        let alg = w.algebra().clone();
        let letters: Vec<AlgebraElement<f64>> =
            (0..(1 + trial % 2)).map(|_| hermitian_contraction(&alg, &mut r)).collect();
        let n = letters.len();
        let word = PoissonWord::new(WordKind::LambdaEmpty, letters).unwrap();
        let check = (|| -> poissonization::Result<f64> {
            let cap = adaptive_cap(&w, p.tolerance, 2 * n, 1.0, alg.linear_dim())?;
            corner_project_oracle_residual(&ctx, &e, &word, cap)
        })();
        match check {
            Ok(res) => records.push(Record::bound_check(format!("corner-{trial}"), res, p.tolerance)),
            Err(e) => records.push(Record::failure(format!("corner-{trial}"), &e.to_string())),
        }
    }
    (records, None)
}

fn independence_suite(p: &SuiteParams) -> (Vec<Record>, Option<CsvTable>) {
    let mut r = rng(p.seed);
    let mut records = Vec::new();
    for trial in 0..p.samples {
        let dim = 2 + trial % 2;
        let (w, e, f, x, y) = corner_pair(dim, &mut r);
        match independence_check(&e, &f, &x, &y, &w) {
            Ok(rep) => {
                records.push(Record::bound_check(
                    format!("factorization-{trial}"),
                    rep.factorization_residual,
                    1e-12,
                ));
                records.push(Record::bound_check(
                    format!("commutator-{trial}"),
                    rep.commutator_norm,
                    1e-10,
                ));
                records.push(Record::bound_check(
                    format!("mixed-moments-{trial}"),
                    rep.mixed_moment_residual,
                    1e-10,
                ));
            }
            Err(err) => records.push(Record::failure(format!("independence-{trial}"), &err.to_string())),
        }
    }
    (records, None)
}

fn entropy_suite(p: &SuiteParams) -> (Vec<Record>, Option<CsvTable>) {
    let mut r = rng(p.seed);
    let mut records = Vec::new();
    let (start, stop, step) = p.levels;
    let mut table = CsvTable {
        header: vec!["trial".into(), "level".into(), "value".into(), "gap".into()],
        rows: vec![],
    };
    for trial in 0..p.samples.min(10) {
        let d = 2 + trial % 2;
        let alg = Algebra::full(d);
        let (rho, psi) = dominated_weight_pair(&alg, p.mass.min(1.5), &mut r);
        match poisson_entropy_report(&rho, &psi, (start..=stop).step_by(step.max(1))) {
            Ok(rep) => {
                for row in &rep.rows {
                    table.rows.push(vec![trial as f64, row.level as f64, row.value, row.gap]);
                }
                let last = rep.rows.last().unwrap();
                records.push(Record::bound_check(format!("entropy-gap-{trial}"), last.gap, 1e-6));
                records.push(Record::boolean(
                    format!("entropy-monotone-{trial}"),
                    rep.gaps_decreasing(),
                ));
            }
            Err(e) => records.push(Record::failure(format!("entropy-{trial}"), &e.to_string())),
        }
    }
    // scalar golden: classical Poisson KL divergence
    for (a, b) in [(0.5f64, 0.9f64), (1.1, 1.4)] {
        let rho = Weight::diagonal(&[a]).unwrap();
        let psi = Weight::diagonal(&[b]).unwrap();
        let got = poisson_relative_entropy(&rho, &psi, 40).unwrap();
        let kl = a * (a / b).ln() + b - a;
        records.push(Record::residual_check(format!("scalar-kl-{a}-{b}"), got, kl, 1e-8));
        records.push(Record::residual_check(
            format!("scalar-lindblad-{a}-{b}"),
            lindblad_entropy(&rho, &psi).unwrap(),
            kl,
            1e-12,
        ));
    }
    // bell-number sanity keeps the partition backend honest in this suite
    records.push(Record::residual_check("bell-8", bell(8).unwrap() as f64, 4140.0, 0.0));
    (records, Some(table))
}
