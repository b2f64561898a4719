//! Quota-driven stratified sampling and train/test splitting.
//!
//! A [`DistributionSpec`] gives per-axis weight tables (category, length,
//! tense, polarity, similarity band) and a requested total. Quotas are
//! apportioned with the largest-remainder method: first across categories
//! (capped by what the pool holds), then within each category across the
//! cross-product of the remaining axes. Strata the pool cannot fill hand
//! their deficit to neighbouring strata, relaxing axes in a fixed order —
//! band first, then polarity, tense, and length — so the realized sample
//! deviates from the ideal distribution as locally as possible.
//!
//! All randomness is drawn from per-stratum substreams derived from one
//! seed, so results are independent of thread count and iteration order:
//! the same seed always selects the same sentences.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::model::{
    AnnotatedSentence, Category, LengthClass, ParallelPair, Polarity, SimilarityBand, Split, Tense,
};

/// Errors from quota computation and sampling.
#[derive(Debug, Error)]
pub enum SampleError {
    /// The distribution spec is malformed.
    #[error("invalid distribution spec: {reason}")]
    InvalidSpec { reason: String },
    /// The pool holds fewer sentences than the requested total.
    #[error("pool holds {available} sentences, {requested} requested")]
    InsufficientPool { requested: usize, available: usize },
    /// The pool contains sentences outside the sampleable length range.
    #[error("pool contains a sentence with length class {0}; filter it first")]
    UnsampleableLength(String),
    /// A stratum's quota exceeds what the pool holds for it.
    #[error("stratum {label} has target {target} but only {available} available")]
    InfeasibleStratum {
        label: String,
        target: usize,
        available: usize,
    },
}

/// A deterministic RNG for one named stream under one seed.
///
/// The stream key is SHA-256 over the seed's little-endian bytes followed
/// by the label, so distinct labels give statistically independent streams
/// and the draw for one stratum never depends on any other.
pub fn substream_rng(seed: u64, label: &str) -> ChaCha20Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(label.as_bytes());
    ChaCha20Rng::from_seed(hasher.finalize().into())
}

/// Apportions `total` units across cells proportionally to `ideals` using
/// the largest-remainder method.
///
/// Each cell gets the floor of its rescaled share; leftover units go to the
/// cells with the largest fractional remainders, ties broken toward the
/// lower index. Non-finite or negative ideals count as zero; if every ideal
/// is zero the split is uniform. The result always sums to `total` (an
/// empty `ideals` with nonzero `total` is a caller bug and returns empty).
pub fn largest_remainder(ideals: &[f64], total: usize) -> Vec<usize> {
    if ideals.is_empty() {
        debug_assert_eq!(total, 0, "cannot apportion into zero cells");
        return Vec::new();
    }
    let cleaned: Vec<f64> = ideals
        .iter()
        .map(|&w| if w.is_finite() && w > 0.0 { w } else { 0.0 })
        .collect();
    let sum: f64 = cleaned.iter().sum();
    let shares: Vec<f64> = if sum > 0.0 {
        cleaned.iter().map(|w| w * total as f64 / sum).collect()
    } else {
        vec![total as f64 / cleaned.len() as f64; cleaned.len()]
    };
    let mut counts: Vec<usize> = shares.iter().map(|s| s.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let leftover = total.saturating_sub(assigned);
    let mut order: Vec<usize> = (0..shares.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = shares[a] - shares[a].floor();
        let rb = shares[b] - shares[b].floor();
        rb.partial_cmp(&ra).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b))
    });
    for k in 0..leftover {
        counts[order[k % order.len()]] += 1;
    }
    counts
}

/// Largest-remainder apportionment with per-cell capacity caps.
///
/// Cells are filled proportionally to `weights`; any cell pushed past its
/// cap is clamped and the excess is re-apportioned over the cells with
/// room, repeating until everything fits. Requires `total <= sum(caps)`.
pub fn apportion_capped(weights: &[f64], caps: &[usize], total: usize) -> Vec<usize> {
    assert_eq!(weights.len(), caps.len());
    debug_assert!(caps.iter().sum::<usize>() >= total, "caps cannot hold total");
    let mut counts = largest_remainder(weights, total);
    loop {
        let mut overflow = 0usize;
        for (c, &cap) in counts.iter_mut().zip(caps) {
            if *c > cap {
                overflow += *c - cap;
                *c = cap;
            }
        }
        if overflow == 0 {
            return counts;
        }
        let free: Vec<usize> = (0..counts.len()).filter(|&i| counts[i] < caps[i]).collect();
        if free.is_empty() {
            return counts;
        }
        let free_weights: Vec<f64> = free.iter().map(|&i| weights[i]).collect();
        let extra = largest_remainder(&free_weights, overflow);
        for (&i, &e) in free.iter().zip(&extra) {
            counts[i] += e;
        }
    }
}

/// The identity of one sampling stratum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct StratumKey {
    pub category: Category,
    pub length: LengthClass,
    pub tense: Tense,
    pub polarity: Polarity,
    pub band: SimilarityBand,
}

impl StratumKey {
    /// The stratum a sentence belongs to.
    pub fn of(sentence: &AnnotatedSentence) -> Self {
        Self {
            category: sentence.category,
            length: sentence.length_class,
            tense: sentence.tense,
            polarity: sentence.polarity,
            band: sentence.similarity_band,
        }
    }

    /// A stable display label, used for substream names and error messages.
    pub fn label(&self) -> String {
        format!(
            "{}/{}/{}/{}/{}",
            self.category.as_str(),
            self.length.as_str(),
            self.tense.as_str(),
            self.polarity.as_str(),
            self.band.as_str()
        )
    }

    /// Whether `other` can absorb this stratum's deficit when the first
    /// `level` axes of the relaxation order (band, polarity, tense, length)
    /// are allowed to differ. The category never relaxes.
    fn matches_at_level(&self, other: &Self, level: u8) -> bool {
        if self.category != other.category {
            return false;
        }
        let polarity_ok = level >= 2 || self.polarity == other.polarity;
        let tense_ok = level >= 3 || self.tense == other.tense;
        let length_ok = level >= 4 || self.length == other.length;
        polarity_ok && tense_ok && length_ok
    }
}

/// Target proportions per axis plus the requested sample size.
///
/// Every axis map must enumerate that axis completely (sampleable lengths
/// only) with non-negative weights summing to one. Weights of zero are
/// legal — such strata receive sentences only through deficit relaxation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionSpec {
    /// Number of sentences to select.
    pub total: usize,
    pub category: BTreeMap<Category, f64>,
    pub length: BTreeMap<LengthClass, f64>,
    pub tense: BTreeMap<Tense, f64>,
    pub polarity: BTreeMap<Polarity, f64>,
    pub band: BTreeMap<SimilarityBand, f64>,
}

/// Length classes a sampling pool may contain.
const SAMPLEABLE_LENGTHS: [LengthClass; 4] = [
    LengthClass::Short,
    LengthClass::Medium,
    LengthClass::Long,
    LengthClass::VeryLong,
];

impl DistributionSpec {
    /// Even categories, the default length mix, tense and polarity split
    /// evenly over their known classes, bands split evenly over assigned
    /// bands. Unknown/unassigned classes carry zero weight, so they enter
    /// the sample only when relaxation needs them.
    pub fn with_total(total: usize) -> Self {
        let category = Category::ALL.iter().map(|&c| (c, 0.2)).collect();
        let length = BTreeMap::from([
            (LengthClass::Short, 0.35),
            (LengthClass::Medium, 0.40),
            (LengthClass::Long, 0.15),
            (LengthClass::VeryLong, 0.10),
        ]);
        let tense = BTreeMap::from([
            (Tense::Past, 0.5),
            (Tense::NonPast, 0.5),
            (Tense::Unknown, 0.0),
        ]);
        let polarity = BTreeMap::from([
            (Polarity::Affirmative, 0.5),
            (Polarity::Negative, 0.5),
            (Polarity::Unknown, 0.0),
        ]);
        let band = BTreeMap::from([
            (SimilarityBand::Low, 1.0 / 3.0),
            (SimilarityBand::Medium, 1.0 / 3.0),
            (SimilarityBand::High, 1.0 / 3.0),
            (SimilarityBand::Unassigned, 0.0),
        ]);
        Self {
            total,
            category,
            length,
            tense,
            polarity,
            band,
        }
    }

    /// Checks axis completeness and weight normalization.
    pub fn validate(&self) -> Result<(), SampleError> {
        fn check_axis<K: Ord + Copy + std::fmt::Debug>(
            name: &str,
            map: &BTreeMap<K, f64>,
            expected: &[K],
        ) -> Result<(), SampleError> {
            for k in expected {
                if !map.contains_key(k) {
                    return Err(SampleError::InvalidSpec {
                        reason: format!("{name} axis is missing {k:?}"),
                    });
                }
            }
            if map.len() != expected.len() {
                return Err(SampleError::InvalidSpec {
                    reason: format!("{name} axis has unexpected entries"),
                });
            }
            let mut sum = 0.0;
            for (k, &w) in map {
                if !w.is_finite() || w < 0.0 {
                    return Err(SampleError::InvalidSpec {
                        reason: format!("{name} weight for {k:?} is not a non-negative number"),
                    });
                }
                sum += w;
            }
            if (sum - 1.0).abs() > 1e-9 {
                return Err(SampleError::InvalidSpec {
                    reason: format!("{name} weights sum to {sum}, expected 1"),
                });
            }
            Ok(())
        }
        check_axis("category", &self.category, &Category::ALL)?;
        check_axis("length", &self.length, &SAMPLEABLE_LENGTHS)?;
        check_axis("tense", &self.tense, &Tense::ALL)?;
        check_axis("polarity", &self.polarity, &Polarity::ALL)?;
        check_axis("band", &self.band, &SimilarityBand::ALL)?;
        Ok(())
    }
}

/// Per-stratum targets plus the realized counts the sampler fills in.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotaTable {
    /// Sentences to draw per stratum; strata with zero target are omitted.
    pub targets: BTreeMap<StratumKey, usize>,
    /// Sentences actually drawn per stratum.
    pub realized: BTreeMap<StratumKey, usize>,
    /// Requested sample size; `targets` always sums to this.
    pub total: usize,
}

/// One stratum of a [`QuotaTable`] flattened for serialization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotaRow {
    /// `Category/Length/Tense/Polarity/Band` label of the stratum.
    pub stratum: String,
    pub target: usize,
    pub realized: usize,
}

impl QuotaTable {
    /// The table as serializable rows, ordered by stratum key.
    pub fn rows(&self) -> Vec<QuotaRow> {
        self.targets
            .iter()
            .map(|(key, &target)| QuotaRow {
                stratum: key.label(),
                target,
                realized: self.realized.get(key).copied().unwrap_or(0),
            })
            .collect()
    }
}

/// Computes per-stratum targets for drawing `spec.total` sentences from
/// `pool`.
///
/// Categories are apportioned first (never exceeding what the pool holds
/// per category), then each category's share is spread over the
/// length × tense × polarity × band cross-product by the product of axis
/// weights. Any stratum the pool cannot fill passes its deficit to the
/// nearest strata with spare capacity under the relaxation order, so the
/// resulting table is always feasible.
pub fn compute_targets(
    pool: &[AnnotatedSentence],
    spec: &DistributionSpec,
) -> Result<QuotaTable, SampleError> {
    spec.validate()?;
    let mut avail: BTreeMap<StratumKey, usize> = BTreeMap::new();
    for s in pool {
        if !SAMPLEABLE_LENGTHS.contains(&s.length_class) {
            return Err(SampleError::UnsampleableLength(
                s.length_class.as_str().to_string(),
            ));
        }
        *avail.entry(StratumKey::of(s)).or_insert(0) += 1;
    }
    if pool.len() < spec.total {
        return Err(SampleError::InsufficientPool {
            requested: spec.total,
            available: pool.len(),
        });
    }

    let categories: Vec<Category> = spec.category.keys().copied().collect();
    let weights: Vec<f64> = categories.iter().map(|c| spec.category[c]).collect();
    let caps: Vec<usize> = categories
        .iter()
        .map(|&c| avail.iter().filter(|(k, _)| k.category == c).map(|(_, n)| n).sum())
        .collect();
    let category_targets = apportion_capped(&weights, &caps, spec.total);

    let mut targets: BTreeMap<StratumKey, usize> = BTreeMap::new();
    for (ci, &category) in categories.iter().enumerate() {
        let mut keys: Vec<StratumKey> = Vec::new();
        let mut ideals: Vec<f64> = Vec::new();
        for (&length, &wl) in &spec.length {
            for (&tense, &wt) in &spec.tense {
                for (&polarity, &wp) in &spec.polarity {
                    for (&band, &wb) in &spec.band {
                        keys.push(StratumKey {
                            category,
                            length,
                            tense,
                            polarity,
                            band,
                        });
                        ideals.push(wl * wt * wp * wb);
                    }
                }
            }
        }
        let mut counts = largest_remainder(&ideals, category_targets[ci]);

        // Resolve deficits: clamp to availability and push the remainder to
        // the nearest strata with spare room, widening one axis at a time.
        for idx in 0..keys.len() {
            let have = avail.get(&keys[idx]).copied().unwrap_or(0);
            if counts[idx] <= have {
                continue;
            }
            let mut deficit = counts[idx] - have;
            counts[idx] = have;
            'levels: for level in 1..=4u8 {
                for j in 0..keys.len() {
                    if j == idx || !keys[idx].matches_at_level(&keys[j], level) {
                        continue;
                    }
                    let room = avail.get(&keys[j]).copied().unwrap_or(0);
                    if counts[j] < room {
                        let take = (room - counts[j]).min(deficit);
                        counts[j] += take;
                        deficit -= take;
                        if deficit == 0 {
                            break 'levels;
                        }
                    }
                }
            }
            if deficit > 0 {
                return Err(SampleError::InfeasibleStratum {
                    label: keys[idx].label(),
                    target: have + deficit,
                    available: have,
                });
            }
        }
        for (key, count) in keys.into_iter().zip(counts) {
            if count > 0 {
                targets.insert(key, count);
            }
        }
    }
    Ok(QuotaTable {
        targets,
        realized: BTreeMap::new(),
        total: spec.total,
    })
}

/// Draws each stratum's quota from `pool` and returns the selected
/// sentence ids in pool order.
///
/// Each stratum uses its own seeded substream, so the selection for one
/// stratum is unaffected by every other. A stratum whose quota exceeds the
/// pool is an error — the sampler never silently under-fills. On success
/// `quotas.realized` equals `quotas.targets`.
pub fn stratified_sample(
    pool: &[AnnotatedSentence],
    quotas: &mut QuotaTable,
    seed: u64,
) -> Result<Vec<String>, SampleError> {
    let mut groups: BTreeMap<StratumKey, Vec<usize>> = BTreeMap::new();
    for (i, s) in pool.iter().enumerate() {
        groups.entry(StratumKey::of(s)).or_default().push(i);
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(quotas.total);
    for (&key, &target) in &quotas.targets {
        if target == 0 {
            continue;
        }
        let members: &[usize] = groups.get(&key).map_or(&[], |v| v.as_slice());
        if members.len() < target {
            return Err(SampleError::InfeasibleStratum {
                label: key.label(),
                target,
                available: members.len(),
            });
        }
        let mut rng = substream_rng(seed, &format!("sample/{}", key.label()));
        for pick in rand::seq::index::sample(&mut rng, members.len(), target).iter() {
            chosen.push(members[pick]);
        }
        quotas.realized.insert(key, target);
    }
    chosen.sort_unstable();
    Ok(chosen.into_iter().map(|i| pool[i].id.clone()).collect())
}

/// Assigns every pair a train/test split, stratified by category × length.
///
/// The test set size is `round(len * test_fraction)`; each stratum
/// contributes proportionally (largest remainder, capped by stratum size),
/// drawn from a per-stratum substream. Returns `(train, test)` counts.
pub fn split_train_test(
    pairs: &mut [ParallelPair],
    test_fraction: f64,
    seed: u64,
) -> Result<(usize, usize), SampleError> {
    if !test_fraction.is_finite() || !(0.0..=1.0).contains(&test_fraction) {
        return Err(SampleError::InvalidSpec {
            reason: format!("test fraction {test_fraction} is not in [0, 1]"),
        });
    }
    let n = pairs.len();
    let total_test = ((n as f64) * test_fraction).round() as usize;
    let mut groups: BTreeMap<(Category, LengthClass), Vec<usize>> = BTreeMap::new();
    for (i, p) in pairs.iter().enumerate() {
        groups
            .entry((p.nepali.category, p.nepali.length_class))
            .or_default()
            .push(i);
    }
    let keys: Vec<(Category, LengthClass)> = groups.keys().copied().collect();
    let sizes: Vec<f64> = keys.iter().map(|k| groups[k].len() as f64).collect();
    let caps: Vec<usize> = keys.iter().map(|k| groups[k].len()).collect();
    let test_counts = apportion_capped(&sizes, &caps, total_test);

    for p in pairs.iter_mut() {
        p.split = Split::Train;
    }
    for (key, take) in keys.iter().zip(&test_counts) {
        if *take == 0 {
            continue;
        }
        let members = &groups[key];
        let label = format!("split/{}/{}", key.0.as_str(), key.1.as_str());
        let mut rng = substream_rng(seed, &label);
        for pick in rand::seq::index::sample(&mut rng, members.len(), *take).iter() {
            pairs[members[pick]].split = Split::Test;
        }
    }
    Ok((n - total_test, total_test))
}
