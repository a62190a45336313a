//! Named invariant suites behind `nilcone verify`. Every check is a
//! deterministic desk-scale sweep or exact formula comparison; a failure
//! carries a minimal counterexample. Two runs with the same options produce
//! identical results up to the timing fields.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::bijections::{
    leinster_forward, leinster_inverse, master_forward, master_inverse, quadruple_split,
    quadruple_unsplit, rho, rho_prime, BalancedTriple, Flavor, MasterElement, Quadruple,
    SplitResult, TaggedVector,
};
use crate::boolmat::{
    bool_is_acyclic, bool_is_nilpotent_power, count_bool_nilpotent_brute, count_dags_recurrence,
    dag_to_matrix, enumerate_bool_matrices, matrix_to_dag,
};
use crate::field::Field;
use crate::linalg::{
    classify_vector, decompose_indecomposables, enumerate_matrices, enumerate_nilpotent_pairs,
    enumerate_vectors, vec_is_zero, LinearPair, Side,
};
use crate::nilpairs::{
    balanced_probability, brute_force_count_nilpotent_pairs, brute_force_nilpotent_census,
    count_balanced_triples_of_length, count_nilpotent_pairs_closed, count_nilpotent_pairs_sum,
    count_nilpotent_pairs_rank_weighted, nilpotent_pair_probability, BigCount, BruteOptions,
};
use crate::setmaps::{
    cayley_count, count_ec_brute, count_ec_formula, count_labeled_trees_census,
    count_spanning_trees_formula, count_spanning_trees_oracle, ec_probability, enumerate_pairs,
    is_eventually_constant_pair, marked_tree_to_pair, pair_to_marked_tree, unique_two_cycle,
};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
}

/// Outcome of one named check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
    pub seconds: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}

/// Desk-scale knobs for the suites. The defaults keep `verify all` well
/// under a minute.
#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    /// Field size for the exhaustive linear-algebra sweeps.
    pub q: u64,
    /// Largest m = n for the exhaustive sweeps.
    pub max_dim: usize,
    /// Ceiling on n^m · m^n for the set-map brute force.
    pub ec_cap: u64,
    pub workers: usize,
}

impl Default for VerifyOptions {
    fn default() -> VerifyOptions {
        VerifyOptions {
            q: 2,
            max_dim: 2,
            ec_cap: 1 << 16,
            workers: 1,
        }
    }
}

fn run_check(name: &str, body: impl FnOnce() -> Result<(), String>) -> CheckResult {
    let start = Instant::now();
    let outcome = body();
    let seconds = start.elapsed().as_secs_f64();
    match outcome {
        Ok(()) => CheckResult {
            name: name.to_string(),
            status: CheckStatus::Pass,
            counterexample: None,
            seconds,
        },
        Err(counterexample) => CheckResult {
            name: name.to_string(),
            status: CheckStatus::Fail,
            counterexample: Some(counterexample),
            seconds,
        },
    }
}

fn dims(max_dim: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for m in 1..=max_dim {
        for n in 1..=max_dim {
            out.push((m, n));
        }
    }
    out
}

pub fn verify_nilpairs(opts: &VerifyOptions) -> Vec<CheckResult> {
    let mut checks = Vec::new();

    checks.push(run_check("nilpairs/three-route-agreement", || {
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            for m in 0..=8u64 {
                for n in 0..=8u64 {
                    let closed = count_nilpotent_pairs_closed(m, n, q).map_err(|e| e.to_string())?;
                    let sum = count_nilpotent_pairs_sum(m, n, q).map_err(|e| e.to_string())?;
                    let weighted =
                        count_nilpotent_pairs_rank_weighted(m, n, q).map_err(|e| e.to_string())?;
                    if closed != sum || closed != weighted {
                        return Err(format!(
                            "q={q} m={m} n={n}: closed={closed} sum={sum} weighted={weighted}"
                        ));
                    }
                }
            }
        }
        Ok(())
    }));

    checks.push({
        let workers = opts.workers;
        run_check("nilpairs/brute-matches-closed", move || {
            for q in [2u64, 3] {
                let field = Field::gf(q).map_err(|e| e.to_string())?;
                for (m, n) in [(1usize, 1usize), (1, 2), (2, 1), (2, 2)] {
                    let closed = count_nilpotent_pairs_closed(m as u64, n as u64, q)
                        .map_err(|e| e.to_string())?;
                    let brute = brute_force_count_nilpotent_pairs(
                        &field,
                        m,
                        n,
                        BruteOptions {
                            workers,
                            ..BruteOptions::default()
                        },
                    )
                    .map_err(|e| e.to_string())?;
                    if closed != brute {
                        return Err(format!("q={q} m={m} n={n}: closed={closed} brute={brute}"));
                    }
                }
            }
            Ok(())
        })
    });

    let q = opts.q;
    let max_dim = opts.max_dim;

    checks.push(run_check("nilpairs/nilpotency-symmetric", move || {
        let field = Field::gf(q).map_err(|e| e.to_string())?;
        for (m, n) in dims(max_dim) {
            for f in enumerate_matrices(&field, n, m) {
                for g in enumerate_matrices(&field, m, n) {
                    let pair = LinearPair::new(f.clone(), g).unwrap();
                    let gf = pair.t().is_nilpotent().unwrap();
                    let fg = pair.t_prime().is_nilpotent().unwrap();
                    if gf != fg {
                        return Err(format!("gf/fg nilpotency disagree on {pair:?}"));
                    }
                }
            }
        }
        Ok(())
    }));

    checks.push(run_check("nilpairs/balance-dichotomy", move || {
        let field = Field::gf(q).map_err(|e| e.to_string())?;
        for (m, n) in dims(max_dim) {
            for pair in enumerate_nilpotent_pairs(&field, m, n) {
                for v in enumerate_vectors(&field, m) {
                    classify_vector(&pair, &v, Side::V)
                        .map_err(|e| format!("v-side {e} on {pair:?}"))?;
                }
                for w in enumerate_vectors(&field, n) {
                    classify_vector(&pair, &w, Side::W)
                        .map_err(|e| format!("w-side {e} on {pair:?}"))?;
                }
            }
        }
        Ok(())
    }));

    checks.push({
        let workers = opts.workers;
        run_check("nilpairs/census-matches-formulas", move || {
            let field = Field::gf(q).map_err(|e| e.to_string())?;
            for (m, n) in dims(max_dim.min(2)) {
                let (m64, n64) = (m as u64, n as u64);
                let census = brute_force_nilpotent_census(
                    &field,
                    m,
                    n,
                    BruteOptions {
                        workers,
                        ..BruteOptions::default()
                    },
                )
                .map_err(|e| e.to_string())?;
                for (ell, &count) in census.balanced_v_by_length.iter().enumerate() {
                    let formula = count_balanced_triples_of_length(m64, n64, q, ell as u64)
                        .map_err(|e| e.to_string())?;
                    if BigCount::from(count) != formula {
                        return Err(format!(
                            "q={q} m={m} n={n} ell={ell}: census={count} formula={formula}"
                        ));
                    }
                }
                let prob = balanced_probability(m64, n64, q).map_err(|e| e.to_string())?;
                let trials = BigInt::from(census.nilpotent) * BigInt::from(q).pow(m as u32);
                let observed = Ratio::new(BigInt::from(census.balanced_v_total()), trials);
                if prob != observed {
                    return Err(format!("q={q} m={m} n={n}: probability {prob} vs {observed}"));
                }
                if census.balanced_v_total() != census.balanced_w_total() {
                    return Err(format!("q={q} m={m} n={n}: V/W balanced totals differ"));
                }
                let pair_prob = nilpotent_pair_probability(m64, n64, q).map_err(|e| e.to_string())?;
                let observed_pairs = Ratio::new(
                    BigInt::from(census.nilpotent),
                    BigInt::from(census.pairs_tested),
                );
                if pair_prob != observed_pairs {
                    return Err(format!(
                        "q={q} m={m} n={n}: pair probability {pair_prob} vs {observed_pairs}"
                    ));
                }
            }
            Ok(())
        })
    });

    checks.push(run_check("nilpairs/decomposition-dimensions", move || {
        let field = Field::gf(q).map_err(|e| e.to_string())?;
        for (m, n) in dims(max_dim) {
            for pair in enumerate_nilpotent_pairs(&field, m, n) {
                let parts = decompose_indecomposables(&pair).map_err(|e| e.to_string())?;
                let (mut dv, mut dw) = (0usize, 0usize);
                for s in &parts {
                    let (a, b) = s.dims();
                    if a.abs_diff(b) > 1 {
                        return Err(format!("summand {s:?} is off-balance on {pair:?}"));
                    }
                    dv += a;
                    dw += b;
                }
                if dv != m || dw != n {
                    return Err(format!("summand dims {dv},{dw} ≠ {m},{n} on {pair:?}"));
                }
            }
        }
        Ok(())
    }));

    checks
}

pub fn verify_bijections(opts: &VerifyOptions) -> Vec<CheckResult> {
    let mut checks = Vec::new();
    let q = opts.q;
    let max_dim = opts.max_dim;

    checks.push(run_check("bijections/leinster-roundtrip", move || {
        let mut fields = vec![Field::gf(q).map_err(|e| e.to_string())?];
        if q == 2 {
            fields.push(Field::gf(3).unwrap());
        }
        for (extra, field) in fields.iter().enumerate() {
            let top = if extra == 0 { max_dim } else { 1 };
            for (m, n) in dims(top) {
                let mut decoded = 0u64;
                for fp in enumerate_matrices(field, n, m) {
                    for gp in enumerate_matrices(field, m, n) {
                        decoded += 1;
                        let t = leinster_inverse(&fp, &gp).map_err(|e| e.to_string())?;
                        let (f2, g2) = leinster_forward(&t);
                        if (&f2, &g2) != (&fp, &gp) {
                            return Err(format!("forward∘inverse ≠ id at {fp:?}{gp:?}"));
                        }
                    }
                }
                let mut triples = 0u64;
                for pair in enumerate_nilpotent_pairs(field, m, n) {
                    for v in enumerate_vectors(field, m) {
                        let Ok(t) = BalancedTriple::new(pair.clone(), v) else {
                            continue;
                        };
                        triples += 1;
                        let (fp, gp) = leinster_forward(&t);
                        let back = leinster_inverse(&fp, &gp).map_err(|e| e.to_string())?;
                        if back != t {
                            return Err(format!("inverse∘forward ≠ id at {t:?}"));
                        }
                    }
                }
                if triples != decoded {
                    return Err(format!(
                        "balanced-triple census {triples} ≠ |Hom×Hom| {decoded} at {m}x{n}"
                    ));
                }
            }
        }
        Ok(())
    }));

    checks.push(run_check("bijections/rho-involution", move || {
        let field = Field::gf(q).map_err(|e| e.to_string())?;
        for (m, n) in dims(max_dim) {
            let mut bb_nonzero = 0u64;
            let mut uu = 0u64;
            for pair in enumerate_nilpotent_pairs(&field, m, n) {
                for v in enumerate_vectors(&field, m) {
                    for w in enumerate_vectors(&field, n) {
                        let Ok(quad) = Quadruple::new(pair.clone(), v.clone(), w) else {
                            continue;
                        };
                        match quad.flavor() {
                            Flavor::BalancedBalanced => {
                                if vec_is_zero(quad.v()) {
                                    continue;
                                }
                                bb_nonzero += 1;
                                let out = rho(&quad).map_err(|e| e.to_string())?;
                                if out.pair().g() != quad.pair().g() {
                                    return Err(format!("rho changed g at {quad:?}"));
                                }
                                if rho_prime(&out).map_err(|e| e.to_string())? != quad {
                                    return Err(format!("rho_prime∘rho ≠ id at {quad:?}"));
                                }
                            }
                            Flavor::UnbalancedUnbalanced => {
                                uu += 1;
                                let back = rho_prime(&quad).map_err(|e| e.to_string())?;
                                if rho(&back).map_err(|e| e.to_string())? != quad {
                                    return Err(format!("rho∘rho_prime ≠ id at {quad:?}"));
                                }
                            }
                        }
                    }
                }
            }
            if bb_nonzero != uu {
                return Err(format!("{bb_nonzero} nonzero-BB vs {uu} UU quadruples at {m}x{n}"));
            }
        }
        Ok(())
    }));

    checks.push(run_check("bijections/quadruple-split", move || {
        let field = Field::gf(q).map_err(|e| e.to_string())?;
        for (m, n) in dims(max_dim) {
            let mut bb = 0u64;
            let mut uu_hits = 0u64;
            let mut w_hits = 0u64;
            for pair in enumerate_nilpotent_pairs(&field, m, n) {
                for v in enumerate_vectors(&field, m) {
                    for w in enumerate_vectors(&field, n) {
                        let Ok(quad) = Quadruple::new(pair.clone(), v.clone(), w) else {
                            continue;
                        };
                        if quad.flavor() != Flavor::BalancedBalanced {
                            continue;
                        }
                        bb += 1;
                        let split = quadruple_split(&quad).map_err(|e| e.to_string())?;
                        match &split {
                            SplitResult::Unbalanced(_) => uu_hits += 1,
                            SplitResult::TripleInW(_) => w_hits += 1,
                        }
                        if quadruple_unsplit(&split).map_err(|e| e.to_string())? != quad {
                            return Err(format!("unsplit∘split ≠ id at {quad:?}"));
                        }
                    }
                }
            }
            if bb != uu_hits + w_hits {
                return Err(format!("split not total at {m}x{n}"));
            }
            let expected_w = BigCount::from(q).pow(2 * (m * n) as u32);
            if BigCount::from(w_hits) != expected_w {
                return Err(format!(
                    "{w_hits} W-triples from v = 0, expected {expected_w} at {m}x{n}"
                ));
            }
        }
        Ok(())
    }));

    checks.push(run_check("bijections/master-roundtrip", move || {
        let mut fields = vec![Field::gf(q).map_err(|e| e.to_string())?];
        if q == 2 {
            fields.push(Field::gf(3).unwrap());
        }
        for (extra, field) in fields.iter().enumerate() {
            let top = if extra == 0 { max_dim } else { 1 };
            for (m, n) in dims(top) {
                let mut left_total = 0u64;
                for f in enumerate_matrices(field, n, m) {
                    for g in enumerate_matrices(field, m, n) {
                        let mut tags: Vec<TaggedVector> =
                            enumerate_vectors(field, n).map(TaggedVector::W).collect();
                        tags.extend(
                            enumerate_vectors(field, m)
                                .filter(|v| !vec_is_zero(v))
                                .map(TaggedVector::V),
                        );
                        for tagged in tags {
                            left_total += 1;
                            let e = MasterElement::maps(f.clone(), g.clone(), tagged)
                                .map_err(|e| e.to_string())?;
                            let r = master_forward(&e).map_err(|e| e.to_string())?;
                            let back = master_inverse(&r).map_err(|e| e.to_string())?;
                            if back != e {
                                return Err(format!("master inverse∘forward ≠ id at {e:?}"));
                            }
                        }
                    }
                }
                let mut right_total = 0u64;
                for pair in enumerate_nilpotent_pairs(field, m, n) {
                    for v in enumerate_vectors(field, m) {
                        for w in enumerate_vectors(field, n) {
                            right_total += 1;
                            let e = MasterElement::nilpotent(pair.clone(), v.clone(), w)
                                .map_err(|e| e.to_string())?;
                            let l = master_inverse(&e).map_err(|e| e.to_string())?;
                            let back = master_forward(&l).map_err(|e| e.to_string())?;
                            if back != e {
                                return Err(format!("master forward∘inverse ≠ id at {e:?}"));
                            }
                        }
                    }
                }
                if left_total != right_total {
                    return Err(format!(
                        "side cardinalities {left_total} vs {right_total} at {m}x{n}"
                    ));
                }
            }
        }
        Ok(())
    }));

    checks.push(run_check("bijections/master-cardinality-formula", || {
        for q in [2u64, 3] {
            for m in 1..=3u64 {
                for n in 1..=3u64 {
                    let big_q = BigCount::from(q);
                    let left = big_q.pow(2 * (m * n) as u32)
                        * (big_q.pow(m as u32) + big_q.pow(n as u32) - BigCount::one());
                    let right = count_nilpotent_pairs_closed(m, n, q).map_err(|e| e.to_string())?
                        * big_q.pow((m + n) as u32);
                    if left != right {
                        return Err(format!("q={q} m={m} n={n}: {left} ≠ {right}"));
                    }
                }
            }
        }
        Ok(())
    }));

    checks.push(run_check("bijections/mirror-census", move || {
        let field = Field::gf(q).map_err(|e| e.to_string())?;
        for (m, n) in dims(max_dim) {
            let mut v_balanced = 0u64;
            let mut w_balanced = 0u64;
            for pair in enumerate_nilpotent_pairs(&field, m, n) {
                for v in enumerate_vectors(&field, m) {
                    if classify_vector(&pair, &v, Side::V).unwrap().is_balanced() {
                        v_balanced += 1;
                    }
                }
                for w in enumerate_vectors(&field, n) {
                    if classify_vector(&pair, &w, Side::W).unwrap().is_balanced() {
                        w_balanced += 1;
                    }
                }
            }
            if v_balanced != w_balanced {
                return Err(format!(
                    "V-side census {v_balanced} ≠ W-side {w_balanced} at {m}x{n}"
                ));
            }
        }
        Ok(())
    }));

    checks
}

pub fn verify_setmaps(opts: &VerifyOptions) -> Vec<CheckResult> {
    let mut checks = Vec::new();

    checks.push({
        let (cap, workers) = (opts.ec_cap, opts.workers);
        run_check("setmaps/count-matches-brute", move || {
            for m in 1..=8u64 {
                for n in 1..=8u64 {
                    let needed = (n as u128)
                        .pow(m as u32)
                        .saturating_mul((m as u128).pow(n as u32));
                    if needed > cap as u128 {
                        continue;
                    }
                    let formula = count_ec_formula(m, n).map_err(|e| e.to_string())?;
                    let brute = count_ec_brute(m, n, cap, workers).map_err(|e| e.to_string())?;
                    if formula != brute {
                        return Err(format!("m={m} n={n}: formula={formula} brute={brute}"));
                    }
                }
            }
            Ok(())
        })
    });

    checks.push(run_check("setmaps/tree-roundtrip", || {
        for m in 1..=3usize {
            for n in 1..=3usize {
                let mut ec = 0u64;
                let mut seen = std::collections::HashSet::new();
                for p in enumerate_pairs(m, n) {
                    if !is_eventually_constant_pair(&p) {
                        continue;
                    }
                    ec += 1;
                    let t = pair_to_marked_tree(&p).map_err(|e| e.to_string())?;
                    let back = marked_tree_to_pair(&t).map_err(|e| e.to_string())?;
                    if back != p {
                        return Err(format!("tree roundtrip failed at {p:?}"));
                    }
                    seen.insert(format!("{t:?}"));
                }
                if seen.len() as u64 != ec {
                    return Err(format!("pair→tree not injective at m={m} n={n}"));
                }
                let formula = count_ec_formula(m as u64, n as u64).map_err(|e| e.to_string())?;
                if BigCount::from(ec) != formula {
                    return Err(format!("m={m} n={n}: {ec} EC pairs vs formula {formula}"));
                }
            }
        }
        Ok(())
    }));

    checks.push(run_check("setmaps/two-cycle-unique", || {
        for m in 1..=3usize {
            for n in 1..=3usize {
                for p in enumerate_pairs(m, n) {
                    let ec = is_eventually_constant_pair(&p);
                    match unique_two_cycle(&p) {
                        Some((x0, y0)) => {
                            if !ec {
                                return Err(format!("non-EC pair with unique 2-cycle: {p:?}"));
                            }
                            if p.f()[x0] != y0 || p.g()[y0] != x0 {
                                return Err(format!("bad 2-cycle ({x0},{y0}) for {p:?}"));
                            }
                        }
                        None => {
                            if ec {
                                return Err(format!("EC pair without unique 2-cycle: {p:?}"));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }));

    checks.push(run_check("setmaps/trees-matrix-tree", || {
        for m in 1..=6u64 {
            for n in 1..=6u64 {
                let formula = count_spanning_trees_formula(m, n).map_err(|e| e.to_string())?;
                let oracle = count_spanning_trees_oracle(m, n).map_err(|e| e.to_string())?;
                if formula != oracle {
                    return Err(format!("K({m},{n}): formula={formula} matrix-tree={oracle}"));
                }
            }
        }
        Ok(())
    }));

    checks.push(run_check("setmaps/cayley-census", || {
        for m in 1..=5u64 {
            let formula = cayley_count(m).map_err(|e| e.to_string())?;
            let census = count_labeled_trees_census(m).map_err(|e| e.to_string())?;
            if formula != census {
                return Err(format!("m={m}: cayley={formula} census={census}"));
            }
        }
        Ok(())
    }));

    checks.push(run_check("setmaps/probability-and-divisibility", || {
        for m in 1..=12u64 {
            for n in 1..=12u64 {
                let count = count_ec_formula(m, n).map_err(|e| e.to_string())?;
                if !(count.clone() % (BigCount::from(m) * BigCount::from(n))).is_zero() {
                    return Err(format!("mn does not divide the EC count at m={m} n={n}"));
                }
                let prob = ec_probability(m, n).map_err(|e| e.to_string())?;
                let total = BigInt::from(n).pow(m as u32) * BigInt::from(m).pow(n as u32);
                let expected = Ratio::new(BigInt::from(count.clone()), total);
                if prob != expected {
                    return Err(format!("m={m} n={n}: probability {prob} ≠ {expected}"));
                }
            }
        }
        Ok(())
    }));

    checks
}

pub fn verify_boolean(opts: &VerifyOptions) -> Vec<CheckResult> {
    let mut checks = Vec::new();

    checks.push(run_check("boolean/power-equals-acyclic", || {
        for n in 0..=4usize {
            let mut nilpotent = 0u64;
            for a in enumerate_bool_matrices(n) {
                let by_power = bool_is_nilpotent_power(&a);
                if by_power != bool_is_acyclic(&a) {
                    return Err(format!("tests disagree on {a:?}"));
                }
                if by_power {
                    nilpotent += 1;
                }
            }
            if BigCount::from(nilpotent) != count_dags_recurrence(n as u64) {
                return Err(format!("census at n={n} does not match the recurrence"));
            }
        }
        Ok(())
    }));

    checks.push(run_check("boolean/nilpotent-structure", || {
        for n in 1..=4usize {
            for a in enumerate_bool_matrices(n) {
                if !bool_is_acyclic(&a) {
                    continue;
                }
                for i in 0..n {
                    if a.get(i, i) {
                        return Err(format!("nilpotent matrix with diagonal 1: {a:?}"));
                    }
                    for j in 0..i {
                        if a.get(i, j) && a.get(j, i) {
                            return Err(format!("nilpotent matrix with symmetric 1s: {a:?}"));
                        }
                    }
                }
            }
        }
        Ok(())
    }));

    checks.push({
        let workers = opts.workers;
        run_check("boolean/recurrence-matches-brute", move || {
            for n in 0..=5u64 {
                let brute = count_bool_nilpotent_brute(n, workers).map_err(|e| e.to_string())?;
                let rec = count_dags_recurrence(n);
                if brute != rec {
                    return Err(format!("n={n}: brute={brute} recurrence={rec}"));
                }
            }
            Ok(())
        })
    });

    checks.push(run_check("boolean/dag-roundtrip", || {
        for n in 0..=3usize {
            for a in enumerate_bool_matrices(n) {
                if !bool_is_acyclic(&a) {
                    continue;
                }
                let edges = matrix_to_dag(&a).map_err(|e| e.to_string())?;
                let back = dag_to_matrix(n, &edges).map_err(|e| e.to_string())?;
                if back != a {
                    return Err(format!("DAG roundtrip failed on {a:?}"));
                }
            }
        }
        Ok(())
    }));

    checks
}

/// All four suites, in a fixed order.
pub fn verify_all(opts: &VerifyOptions) -> Vec<CheckResult> {
    let mut checks = verify_nilpairs(opts);
    checks.extend(verify_bijections(opts));
    checks.extend(verify_setmaps(opts));
    checks.extend(verify_boolean(opts));
    checks
}
