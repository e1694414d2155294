//! Block measures `nu_m`, the thinned `nu_bar_p`, and the tree measure `lambda`
//! on admissible sequences.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::admissible::{
    construct_blocks, exceptional_choices, schedule_for, AdmissibleSeq, Element, ExceptionalSet,
    Schedule, ScheduleParams,
};
use crate::cf::{continuant, continuant_u128, ln_big};
use crate::error::{Error, Result};
use crate::profile::ApproxProfile;

/// How the thinning center `sigma` is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SigmaRule {
    /// Center of the window holding the most product mass.
    #[default]
    MaxWindowMass,
    /// Mean of `ln K` under the product measure, divided by `J`.
    ProductMean,
    /// A fixed per-block value.
    Fixed(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NuBarOptions {
    pub min_mass: f64,
    pub sigma_rule: SigmaRule,
    pub budget: usize,
}

impl Default for NuBarOptions {
    fn default() -> Self {
        NuBarOptions { min_mass: 0.5, sigma_rule: SigmaRule::MaxWindowMass, budget: 10_000_000 }
    }
}

/// A probability measure on words of fixed length, stored in log space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockMeasure {
    pub n: u32,
    pub epsilon: f64,
    pub block_len: usize,
    /// Lexicographically sorted support.
    pub blocks: Vec<Vec<u32>>,
    pub ln_weights: Vec<f64>,
    /// `ln K(block)` (block continuant).
    pub ln_k: Vec<f64>,
    /// `ln S_m` for `nu_m`, `ln mass(E)` for the thinned measure.
    pub ln_norm: f64,
    pub sigma: Option<f64>,
    pub thinned_mass: Option<f64>,
    /// Product weight `prod nu_m(w_i)` of each support block (thinned measure only).
    pub product_ln_weights: Option<Vec<f64>>,
}

impl BlockMeasure {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn index_of(&self, block: &[u32]) -> Option<usize> {
        self.blocks.binary_search_by(|b| b.as_slice().cmp(block)).ok()
    }

    pub fn ln_weight_of(&self, block: &[u32]) -> Option<f64> {
        self.index_of(block).map(|i| self.ln_weights[i])
    }

    pub fn total_mass(&self) -> f64 {
        ln_sum_exp(&self.ln_weights).exp()
    }

    /// `max nu_bar(w) / prod nu_m(w_i)` over the support.
    pub fn property_a_factor(&self) -> Option<f64> {
        let prod = self.product_ln_weights.as_ref()?;
        Some(
            self.ln_weights
                .iter()
                .zip(prod)
                .map(|(a, b)| (a - b).exp())
                .fold(0.0, f64::max),
        )
    }

    /// Whether every support block sits in the thinning window (`ln_k` is per block).
    pub fn property_b_holds(&self) -> Option<bool> {
        let s = self.sigma?;
        Some(self.ln_k.iter().all(|&lk| (lk - s).abs() < self.epsilon / 500.0 * s))
    }
}

/// `ln sum exp(x_i)`, compensated and order independent.
pub fn ln_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    let mut v: Vec<f64> = xs.iter().map(|x| (x - m).exp()).collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for x in v {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    m + (s + c).ln()
}

fn ln_block_continuant(w: &[u32]) -> f64 {
    match continuant_u128(w) {
        Some(v) => (v as f64).ln(),
        None => ln_big(&continuant(&w.iter().map(|&c| c as u64).collect::<Vec<_>>())),
    }
}

fn words(n: u32, m: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        let mut next = Vec::with_capacity(out.len() * n as usize);
        for w in &out {
            for c in 1..=n {
                let mut v = w.clone();
                v.push(c);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// `nu_m(w) = K(w)^(-2(1-eps)) / S_m` on `{1..N}^m`.
pub fn build_nu_m(n: u32, m: usize, eps: f64, budget: usize) -> Result<BlockMeasure> {
    if n < 1 || m < 1 {
        return Err(Error::Config("need N >= 1 and m >= 1".into()));
    }
    if (n as f64).powi(m as i32) > budget as f64 {
        return Err(Error::Budget(format!("N^m = {}^{m} exceeds enumeration budget {budget}", n)));
    }
    let blocks = words(n, m);
    let ln_k: Vec<f64> = blocks.iter().map(|w| ln_block_continuant(w)).collect();
    let raw: Vec<f64> = ln_k.iter().map(|l| -2.0 * (1.0 - eps) * l).collect();
    let ln_s = ln_sum_exp(&raw);
    Ok(BlockMeasure {
        n,
        epsilon: eps,
        block_len: m,
        blocks,
        ln_weights: raw.iter().map(|r| r - ln_s).collect(),
        ln_k,
        ln_norm: ln_s,
        sigma: None,
        thinned_mass: None,
        product_ln_weights: None,
    })
}

/// Thinned measure on `J`-fold concatenations of `nu_m` words near `exp(J sigma)`.
pub fn build_nu_bar(nu: &BlockMeasure, j: usize, opts: &NuBarOptions) -> Result<BlockMeasure> {
    let count = (nu.len() as f64).powi(j as i32);
    if count > opts.budget as f64 {
        return Err(Error::Budget(format!(
            "{} products exceed enumeration budget {}; use the sampled mass estimate",
            count, opts.budget
        )));
    }
    let mut prods: Vec<(Vec<u32>, f64)> = vec![(Vec::new(), 0.0)];
    for _ in 0..j {
        let mut next = Vec::with_capacity(prods.len() * nu.len());
        for (w, lw) in &prods {
            for (b, lb) in nu.blocks.iter().zip(&nu.ln_weights) {
                let mut v = w.clone();
                v.extend_from_slice(b);
                next.push((v, lw + lb));
            }
        }
        prods = next;
    }
    let ln_k: Vec<f64> = prods.iter().map(|(w, _)| ln_block_continuant(w)).collect();
    let eps = nu.epsilon;
    let jf = j as f64;

    let in_window = |lk: f64, s: f64| (lk - jf * s).abs() < eps / 500.0 * jf * s;
    let mass_at = |s: f64| {
        let t: Vec<f64> = prods
            .iter()
            .zip(&ln_k)
            .filter(|(_, &lk)| in_window(lk, s))
            .map(|((_, lw), _)| *lw)
            .collect();
        if t.is_empty() {
            0.0
        } else {
            ln_sum_exp(&t).exp()
        }
    };

    let sigma = match opts.sigma_rule {
        SigmaRule::Fixed(s) => s,
        SigmaRule::ProductMean => {
            prods.iter().zip(&ln_k).map(|((_, lw), lk)| lw.exp() * lk).sum::<f64>() / jf
        }
        SigmaRule::MaxWindowMass => {
            let mut cands: Vec<f64> = ln_k.iter().map(|lk| lk / jf).collect();
            cands.sort_by(|a, b| a.partial_cmp(b).unwrap());
            cands.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
            let mut best = (f64::NEG_INFINITY, 0.0);
            for s in cands {
                if s <= 0.0 {
                    continue;
                }
                let m = mass_at(s);
                if m > best.0 + 1e-15 {
                    best = (m, s);
                }
            }
            best.1
        }
    };
    if !(sigma > 0.0) {
        return Err(Error::EmptyExceptionalSet { stage: 0, width: 0.0 });
    }

    let mut blocks = Vec::new();
    let mut lws = Vec::new();
    let mut lks = Vec::new();
    for ((w, lw), &lk) in prods.iter().zip(&ln_k) {
        if in_window(lk, sigma) {
            blocks.push(w.clone());
            lws.push(*lw);
            lks.push(lk);
        }
    }
    if blocks.is_empty() {
        return Err(Error::Infeasible(format!("thinned support is empty at sigma = {sigma}")));
    }
    let ln_mass = ln_sum_exp(&lws);
    let mass = ln_mass.exp();
    if mass < opts.min_mass {
        return Err(Error::InsufficientJ { mass, required: opts.min_mass });
    }
    Ok(BlockMeasure {
        n: nu.n,
        epsilon: eps,
        block_len: nu.block_len * j,
        blocks,
        ln_weights: lws.iter().map(|l| l - ln_mass).collect(),
        ln_k: lks.iter().map(|lk| lk / jf).collect(),
        ln_norm: ln_mass,
        sigma: Some(sigma),
        thinned_mass: Some(mass),
        product_ln_weights: Some(lws),
    })
}

/// Monte Carlo estimate of the thinned mass, as `(mean, standard error)`.
pub fn estimate_thinned_mass_sampled(
    nu: &BlockMeasure,
    j: usize,
    sigma: f64,
    samples: usize,
    seed: u64,
) -> (f64, f64) {
    let w = WeightedIndex::new(nu.ln_weights.iter().map(|l| l.exp())).expect("positive weights");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jf = j as f64;
    let mut hits = 0usize;
    for _ in 0..samples {
        let mut word = Vec::with_capacity(nu.block_len * j);
        for _ in 0..j {
            word.extend_from_slice(&nu.blocks[w.sample(&mut rng)]);
        }
        let lk = ln_block_continuant(&word);
        if (lk - jf * sigma).abs() < nu.epsilon / 500.0 * jf * sigma {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    (p, (p * (1.0 - p) / samples as f64).sqrt())
}

/// What can follow a prefix.
#[derive(Clone, Debug)]
pub enum Children {
    /// Indices into the thinned support.
    A,
    B(ExceptionalSet),
}

/// Lower and upper bounds on a mass, in log space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LnBracket {
    pub lower: f64,
    pub upper: f64,
}

impl LnBracket {
    pub fn lower_mass(&self) -> f64 {
        self.lower.exp()
    }
    pub fn upper_mass(&self) -> f64 {
        self.upper.exp()
    }
}

/// The measure `lambda` on admissible sequences, expanded lazily.
pub struct MeasureTree {
    pub profile: ApproxProfile,
    pub schedule: Schedule,
    pub nubar: BlockMeasure,
    sampler: WeightedIndex<f64>,
    cache: Mutex<HashMap<(usize, BigUint), ExceptionalSet>>,
}

impl MeasureTree {
    pub fn build(profile: &ApproxProfile, params: &ScheduleParams) -> Result<Self> {
        let (_, nubar) = construct_blocks(params)?;
        let schedule = schedule_for(profile, params, &nubar)?;
        Self::from_parts(profile.clone(), schedule, nubar)
    }

    pub fn from_parts(profile: ApproxProfile, schedule: Schedule, nubar: BlockMeasure) -> Result<Self> {
        let sampler = WeightedIndex::new(nubar.ln_weights.iter().map(|l| l.exp()))
            .map_err(|e| Error::InvalidInput(format!("block weights: {e}")))?;
        Ok(MeasureTree { profile, schedule, nubar, sampler, cache: Mutex::new(HashMap::new()) })
    }

    /// `T_k(G)`, memoised on `(k, K(G))`.
    pub fn exceptional(&self, seq: &AdmissibleSeq, k: usize) -> Result<ExceptionalSet> {
        let key = (k, seq.cf.k());
        if let Some(t) = self.cache.lock().expect("cache").get(&key) {
            return Ok(t.clone());
        }
        let t = exceptional_choices(&seq.cf, k, &self.schedule, &self.profile)?;
        self.cache.lock().expect("cache").insert(key, t.clone());
        Ok(t)
    }

    pub fn children(&self, seq: &AdmissibleSeq) -> Result<Children> {
        match seq.next_b_stage(&self.schedule) {
            Some(k) => Ok(Children::B(self.exceptional(seq, k)?)),
            None => Ok(Children::A),
        }
    }

    /// `ln lambda(G)`; errors when `G` is not admissible.
    pub fn ln_weight(&self, seq: &AdmissibleSeq) -> Result<f64> {
        let mut cur = AdmissibleSeq::new();
        let mut lw = 0.0;
        for (i, e) in seq.elems.iter().enumerate() {
            match (e, self.children(&cur)?) {
                (Element::A(block), Children::A) => {
                    let w = self.nubar.ln_weight_of(block).ok_or_else(|| {
                        Error::Verification(format!("element {i}: block outside supp nu_bar"))
                    })?;
                    lw += w;
                    cur.push_a(block)?;
                }
                (Element::B(b), Children::B(t)) => {
                    if !t.contains(b) {
                        return Err(Error::Verification(format!(
                            "element {i}: b_{} = {b} outside T_{}",
                            t.stage, t.stage
                        )));
                    }
                    lw -= t.ln_count();
                    cur.push_b(b.clone())?;
                }
                (Element::A(_), Children::B(t)) => {
                    return Err(Error::Verification(format!(
                        "element {i}: a-block where b_{} is required",
                        t.stage
                    )))
                }
                (Element::B(_), Children::A) => {
                    return Err(Error::Verification(format!(
                        "element {i}: exceptional entry at a non-terminal position"
                    )))
                }
            }
        }
        Ok(lw)
    }

    /// `ln lambda_G(F)` for the continuation `F` of `g`, summed over `F` in order.
    pub fn relative_ln_weight(&self, g: &AdmissibleSeq, tail: &[Element]) -> Result<f64> {
        let mut cur = g.clone();
        let mut lw = 0.0;
        for e in tail {
            match (e, self.children(&cur)?) {
                (Element::A(block), Children::A) => {
                    lw += self
                        .nubar
                        .ln_weight_of(block)
                        .ok_or_else(|| Error::Verification("block outside supp nu_bar".into()))?;
                    cur.push_a(block)?;
                }
                (Element::B(b), Children::B(t)) if t.contains(b) => {
                    lw -= t.ln_count();
                    cur.push_b(b.clone())?;
                }
                _ => return Err(Error::Verification(format!("{} is not an admissible continuation", cur.key()))),
            }
        }
        Ok(lw)
    }

    pub fn lambda_weight(&self, seq: &AdmissibleSeq) -> Result<f64> {
        Ok(self.ln_weight(seq)?.exp())
    }

    /// All admissible sequences with exactly `depth` elements and their log weights.
    /// Exceptional levels larger than `b_limit` raise a budget error.
    pub fn enumerate(&self, depth: usize, b_limit: usize, node_limit: usize) -> Result<Vec<(AdmissibleSeq, f64)>> {
        self.enumerate_from(&AdmissibleSeq::new(), 0.0, depth, b_limit, node_limit)
    }

    /// Continuations of `g` by exactly `extra` elements, with `ln_wg` added to every weight.
    pub fn enumerate_from(
        &self,
        g: &AdmissibleSeq,
        ln_wg: f64,
        extra: usize,
        b_limit: usize,
        node_limit: usize,
    ) -> Result<Vec<(AdmissibleSeq, f64)>> {
        let depth = g.len() + extra;
        let mut frontier = vec![(g.clone(), ln_wg)];
        for _ in 0..extra {
            let expanded: Vec<Result<Vec<(AdmissibleSeq, f64)>>> = frontier
                .par_iter()
                .map(|(s, lw)| self.expand(s, *lw, b_limit))
                .collect();
            let mut next = Vec::new();
            for r in expanded {
                next.extend(r?);
                if next.len() > node_limit {
                    return Err(Error::Budget(format!("more than {node_limit} nodes at depth {depth}")));
                }
            }
            frontier = next;
        }
        Ok(frontier)
    }

    fn expand(&self, s: &AdmissibleSeq, lw: f64, b_limit: usize) -> Result<Vec<(AdmissibleSeq, f64)>> {
        match self.children(s)? {
            Children::A => self
                .nubar
                .blocks
                .iter()
                .zip(&self.nubar.ln_weights)
                .map(|(b, w)| Ok((s.with_a(b)?, lw + w)))
                .collect(),
            Children::B(t) => {
                let lc = t.ln_count();
                t.members(b_limit)?
                    .into_iter()
                    .map(|b| Ok((s.with_b(b)?, lw - lc)))
                    .collect()
            }
        }
    }

    /// Certified bracket on `lambda_sharp([lo, hi])` from the tree truncated at `depth` elements.
    pub fn pushforward_interval(&self, lo: &BigRational, hi: &BigRational, depth: usize) -> Result<LnBracket> {
        self.pushforward_from(&AdmissibleSeq::new(), 0.0, lo, hi, depth)
    }

    /// Same, restricted to the subtree under `g` (not normalised).
    pub fn pushforward_from(
        &self,
        g: &AdmissibleSeq,
        ln_wg: f64,
        lo: &BigRational,
        hi: &BigRational,
        depth: usize,
    ) -> Result<LnBracket> {
        if lo > hi {
            return Err(Error::InvalidInput("interval endpoints out of order".into()));
        }
        let mut acc = Acc::default();
        self.push_rec(g, ln_wg, lo, hi, depth, &mut acc)?;
        Ok(LnBracket { lower: ln_sum_exp(&acc.inside), upper: ln_sum_exp(&[acc.inside, acc.partial].concat()) })
    }

    /// `lambda_G` pushed forward by the tail map: mass of `{y : G y in ...}` for `y` in `[ylo, yhi]`.
    pub fn relative_pushforward(
        &self,
        g: &AdmissibleSeq,
        ylo: &BigRational,
        yhi: &BigRational,
        depth: usize,
    ) -> Result<LnBracket> {
        let lwg = self.ln_weight(g)?;
        if g.is_empty() {
            return self.pushforward_interval(ylo, yhi, depth);
        }
        let a = g.cf.apply(ylo);
        let b = g.cf.apply(yhi);
        let (x0, x1) = if a <= b { (a, b) } else { (b, a) };
        let r = self.pushforward_from(g, lwg, &x0, &x1, depth)?;
        Ok(LnBracket { lower: r.lower - lwg, upper: r.upper - lwg })
    }

    fn push_rec(
        &self,
        node: &AdmissibleSeq,
        lw: f64,
        lo: &BigRational,
        hi: &BigRational,
        depth: usize,
        acc: &mut Acc,
    ) -> Result<()> {
        if !node.is_empty() {
            let cyl = node.cf.cylinder()?;
            if &cyl.hi <= lo || &cyl.lo >= hi {
                return Ok(());
            }
            if lo <= &cyl.lo && &cyl.hi <= hi {
                acc.inside.push(lw);
                return Ok(());
            }
        }
        if node.len() >= depth {
            acc.partial.push(lw);
            return Ok(());
        }
        match self.children(node)? {
            Children::A => {
                for (b, w) in self.nubar.blocks.iter().zip(&self.nubar.ln_weights) {
                    let child = node.with_a(b)?;
                    self.push_rec(&child, lw + w, lo, hi, depth, acc)?;
                }
            }
            Children::B(t) => {
                let lwc = lw - t.ln_count();
                let cyl = node.cf.cylinder()?;
                let a = if lo > &cyl.lo { lo.clone() } else { cyl.lo.clone() };
                let b = if hi < &cyl.hi { hi.clone() } else { cyl.hi.clone() };
                let ya = tail_of(node, &a);
                let yb = tail_of(node, &b);
                let (ylo, yhi) = match (ya, yb) {
                    (Some(u), Some(v)) => if u <= v { (u, Some(v)) } else { (v, Some(u)) },
                    (Some(u), None) | (None, Some(u)) => (u, None),
                    (None, None) => return Ok(()),
                };
                let t_last = &t.hi - 1u32;
                // fully contained b: ceil(ylo) <= b <= floor(yhi) - 1
                let c_lo = max_u(ceil_nonneg(&ylo), t.lo.clone());
                let c_hi = match &yhi {
                    Some(v) => min_u(floor_nonneg(v).checked_sub_one(), t_last.clone()),
                    None => Some(t_last.clone()),
                };
                if let Some(ch) = &c_hi {
                    if &c_lo <= ch {
                        let n = ch - &c_lo + 1u32;
                        acc.inside.push(lwc + ln_big(&n));
                    }
                }
                // boundary b: floor(ylo) and ceil(yhi) - 1 when not already contained
                let mut edge = vec![floor_nonneg(&ylo)];
                if let Some(v) = &yhi {
                    if let Some(e) = ceil_nonneg(v).checked_sub_one() {
                        edge.push(e);
                    }
                }
                edge.sort();
                edge.dedup();
                for e in edge {
                    if !t.contains(&e) {
                        continue;
                    }
                    let inside = matches!(&c_hi, Some(ch) if c_lo <= e && &e <= ch);
                    if inside {
                        continue;
                    }
                    let child = node.with_b(e)?;
                    self.push_rec(&child, lwc, lo, hi, depth, acc)?;
                }
            }
        }
        Ok(())
    }

    /// Draws `count` sequences of `depth` elements; sample `i` uses stream `i` of the seed.
    pub fn sample(&self, depth: usize, count: usize, seed: u64) -> Result<Vec<AdmissibleSeq>> {
        (0..count)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                self.sample_one(depth, &mut rng)
            })
            .collect()
    }

    /// Draws continuations of `g` to `depth` elements, distributed as `lambda_G`.
    pub fn sample_from(&self, g: &AdmissibleSeq, depth: usize, count: usize, seed: u64) -> Result<Vec<AdmissibleSeq>> {
        (0..count)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                self.extend_random(g.clone(), depth, &mut rng)
            })
            .collect()
    }

    pub fn sample_one<R: Rng>(&self, depth: usize, rng: &mut R) -> Result<AdmissibleSeq> {
        self.extend_random(AdmissibleSeq::new(), depth, rng)
    }

    fn extend_random<R: Rng>(&self, mut s: AdmissibleSeq, depth: usize, rng: &mut R) -> Result<AdmissibleSeq> {
        while s.len() < depth {
            match self.children(&s)? {
                Children::A => {
                    let i = self.sampler.sample(rng);
                    s.push_a(&self.nubar.blocks[i])?;
                }
                Children::B(t) => {
                    let b = rng.gen_biguint_range(&t.lo, &t.hi);
                    s.push_b(b)?;
                }
            }
        }
        Ok(s)
    }

    /// Serializable record of the tree down to `depth`.
    pub fn snapshot(&self, depth: usize, b_limit: usize, node_limit: usize) -> Result<Snapshot> {
        let nodes = self
            .enumerate(depth, b_limit, node_limit)?
            .into_iter()
            .map(|(s, lw)| SnapshotNode { key: s.key(), ln_weight: fmt17(lw) })
            .collect();
        Ok(Snapshot { schema_version: SNAPSHOT_SCHEMA, depth, schedule: self.schedule.clone(), nubar: self.nubar.clone(), nodes })
    }
}

#[derive(Default)]
struct Acc {
    inside: Vec<f64>,
    partial: Vec<f64>,
}

trait SubOne: Sized {
    fn checked_sub_one(self) -> Option<Self>;
}

impl SubOne for BigUint {
    fn checked_sub_one(self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self - 1u32)
        }
    }
}

fn max_u(a: BigUint, b: BigUint) -> BigUint {
    if a > b {
        a
    } else {
        b
    }
}

fn min_u(a: Option<BigUint>, b: BigUint) -> Option<BigUint> {
    a.map(|a| if a < b { a } else { b })
}

fn to_nonneg(v: BigInt) -> BigUint {
    if v.is_negative() {
        BigUint::zero()
    } else {
        v.to_biguint().expect("nonnegative")
    }
}

fn ceil_nonneg(x: &BigRational) -> BigUint {
    to_nonneg(x.ceil().to_integer())
}

fn floor_nonneg(x: &BigRational) -> BigUint {
    to_nonneg(x.floor().to_integer())
}

/// `y` with `G y = x`; `None` for `x = p/q`.
fn tail_of(g: &AdmissibleSeq, x: &BigRational) -> Option<BigRational> {
    let (p, pp, q, qp) = g.cf.mobius();
    let p = BigRational::from_integer(BigInt::from(p.clone()));
    let pp = BigRational::from_integer(BigInt::from(pp.clone()));
    let q = BigRational::from_integer(BigInt::from(q.clone()));
    let qp = BigRational::from_integer(BigInt::from(qp.clone()));
    let den = &q * x - &p;
    if den.is_zero() {
        return None;
    }
    Some((pp - qp * x) / den)
}

pub const SNAPSHOT_SCHEMA: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SnapshotNode {
    pub key: String,
    pub ln_weight: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Snapshot {
    pub schema_version: u32,
    pub depth: usize,
    pub schedule: Schedule,
    pub nubar: BlockMeasure,
    pub nodes: Vec<SnapshotNode>,
}

/// Seventeen significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{:.16e}", x)
}

/// Probability mass of an interval given as `f64` endpoints, for quick looks.
pub fn interval_from_f64(lo: f64, hi: f64) -> Result<(BigRational, BigRational)> {
    let a = BigRational::from_float(lo).ok_or_else(|| Error::InvalidInput("non-finite endpoint".into()))?;
    let b = BigRational::from_float(hi).ok_or_else(|| Error::InvalidInput("non-finite endpoint".into()))?;
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nu_m_normalised() {
        let nu = build_nu_m(3, 2, 0.2, 1000).unwrap();
        assert_eq!(nu.len(), 9);
        assert!((nu.total_mass() - 1.0).abs() < 1e-14);
        // K(1,1) = 2, K(3,3) = 10
        let r = nu.ln_weight_of(&[1, 1]).unwrap() - nu.ln_weight_of(&[3, 3]).unwrap();
        assert!((r - 1.6 * (5f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn nu_bar_desk() {
        let nu = build_nu_m(6, 2, 0.2, 1000).unwrap();
        let opts = NuBarOptions { min_mass: 0.2, ..Default::default() };
        let nb = build_nu_bar(&nu, 1, &opts).unwrap();
        assert_eq!(nb.blocks, vec![vec![1, 2], vec![2, 1]]);
        assert!((nb.sigma.unwrap() - 3f64.ln()).abs() < 1e-12);
        assert!((nb.total_mass() - 1.0).abs() < 1e-14);
        let strict = build_nu_bar(&nu, 1, &NuBarOptions::default());
        assert!(matches!(strict, Err(Error::InsufficientJ { .. })));
    }

    #[test]
    fn ln_sum_exp_basic() {
        let v = ln_sum_exp(&[0f64.ln(), 1f64.ln(), 3f64.ln()]);
        assert!((v - 4f64.ln()).abs() < 1e-15);
    }
}
