//! Exhaustive verification machinery: enumerate connection sets of a given
//! order (optionally one representative per multiplier class), classify each
//! circulant with its applicable lemma audits, verify the no-counterexample
//! theorem over all odd orders up to a cap, and emit deterministic JSONL and
//! CSV reports.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;

use crate::circulant_analysis::{
    connection_orbits, double_cover_connection_set, is_arc_transitive, is_normal_circulant,
    normal_implies_stable_audit, subcirculant_audit,
};
use crate::error::{Error, Result};
use crate::graph::{circulant, ConnectionSet};
use crate::stability::{
    classify, is_stable_by_order, is_stable_by_stabilizer, is_stable_by_tau_central,
    worthiness_check, StabilityVerdict, Status,
};

/// Hard cap for enumeration-based commands; the number of inverse-closed
/// subsets doubles with every residue pair.
pub const ENUMERATION_ORDER_CAP: usize = 32;

/// Default order cap for the theorem-verification sweep (double covers
/// reach 30 vertices).
pub const DEFAULT_THEOREM_ORDER_CAP: usize = 15;

/// Default order cap for classification sweeps.
pub const DEFAULT_SWEEP_ORDER_CAP: usize = 16;

/// All nonempty inverse-closed subsets of Z_n \ {0}, sorted lexicographically
/// by element list. With `dedup`, keeps one representative per orbit of the
/// multiplier action S ↦ uS (u a unit mod n): the lexicographic minimum.
/// Multiplier images are isomorphic circulants, so deduplication never drops
/// an isomorphism class.
pub fn enumerate_connection_sets(n: usize, dedup: bool) -> Result<Vec<ConnectionSet>> {
    if n < 2 {
        return Err(Error::Validation(format!(
            "enumeration requires order at least 2, got {}",
            n
        )));
    }
    if n > ENUMERATION_ORDER_CAP {
        return Err(Error::Capacity(format!(
            "enumeration accepts orders up to {}, got {}",
            ENUMERATION_ORDER_CAP, n
        )));
    }
    let atoms: Vec<Vec<usize>> = (1..=n / 2)
        .map(|s| if s == n - s { vec![s] } else { vec![s, n - s] })
        .collect();
    let mut out = Vec::new();
    for mask in 1u64..1 << atoms.len() {
        let mut elems = Vec::new();
        for (i, atom) in atoms.iter().enumerate() {
            if mask >> i & 1 == 1 {
                elems.extend_from_slice(atom);
            }
        }
        let set = ConnectionSet::new(n, elems)
            .expect("unions of inverse pairs are valid connection sets");
        if !dedup || is_multiplier_minimal(&set) {
            out.push(set);
        }
    }
    out.sort();
    Ok(out)
}

fn is_multiplier_minimal(set: &ConnectionSet) -> bool {
    let n = set.modulus();
    for u in 2..n {
        if crate::circulant_analysis::gcd(u, n) != 1 {
            continue;
        }
        let mut image: Vec<usize> = set.elems().iter().map(|&s| s * u % n).collect();
        image.sort_unstable();
        if image[..] < *set.elems() {
            return false;
        }
    }
    true
}

/// Outcome of one lemma audit inside a classification record.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AuditOutcome {
    Pass,
    Fail,
    /// Not applicable to this instance, or skipped for capacity; the string
    /// says which.
    Skipped(String),
}

impl AuditOutcome {
    pub fn is_fail(&self) -> bool {
        matches!(self, AuditOutcome::Fail)
    }
}

impl std::fmt::Display for AuditOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AuditOutcome::Pass => write!(f, "pass"),
            AuditOutcome::Fail => write!(f, "fail"),
            AuditOutcome::Skipped(why) => write!(f, "skipped: {}", why),
        }
    }
}

impl Serialize for AuditOutcome {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// Everything the sweep knows about one circulant instance.
#[derive(Clone, Debug, Serialize)]
pub struct ClassificationRecord {
    pub n: usize,
    pub set: ConnectionSet,
    pub connected: bool,
    pub bipartite: bool,
    pub irreducible: bool,
    pub verdict: StabilityVerdict,
    /// None when the instance is disconnected (the arc-transitivity test
    /// assumes connectivity).
    pub arc_transitive: Option<bool>,
    pub normal: bool,
    pub lemma_audits: BTreeMap<String, AuditOutcome>,
}

impl ClassificationRecord {
    pub fn audit_failures(&self) -> usize {
        self.lemma_audits.values().filter(|o| o.is_fail()).count()
    }
}

/// Capacity problems downgrade an audit to Skipped; an internal invariant
/// violation is an audit failure; anything else is a real error.
fn audit_outcome(result: Result<bool>) -> Result<AuditOutcome> {
    match result {
        Ok(true) => Ok(AuditOutcome::Pass),
        Ok(false) => Ok(AuditOutcome::Fail),
        Err(Error::Capacity(msg)) => Ok(AuditOutcome::Skipped(format!("capacity: {}", msg))),
        Err(Error::Internal(_)) => Ok(AuditOutcome::Fail),
        Err(e) => Err(e),
    }
}

fn skipped(why: &str) -> AuditOutcome {
    AuditOutcome::Skipped(why.to_string())
}

/// Classifies one circulant and runs every applicable lemma audit:
/// worthiness (reducibility transfer to the double cover), the
/// normal-cover-implies-stable audit, agreement of the three stability
/// criteria, and the subcirculant audit on each stabilizer orbit of the
/// double cover's connection set.
pub fn analyze_one(set: &ConnectionSet) -> Result<ClassificationRecord> {
    let n = set.modulus();
    let x = circulant(set)?;
    let connected = x.is_connected();
    let bipartite = x.is_bipartite();
    let irreducible = x.is_irreducible();
    let verdict = classify(&x)?;
    let arc_transitive = if connected {
        Some(is_arc_transitive(set)?)
    } else {
        None
    };
    let normal = is_normal_circulant(set)?;

    let mut audits = BTreeMap::new();
    audits.insert(
        "worthiness".to_string(),
        audit_outcome(worthiness_check(&x))?,
    );
    audits.insert(
        "normal_implies_stable".to_string(),
        if n % 2 == 1 && connected {
            audit_outcome(normal_implies_stable_audit(set))?
        } else {
            skipped("requires a connected circulant of odd order")
        },
    );
    audits.insert(
        "criterion_agreement".to_string(),
        if connected && !bipartite {
            let by_order = verdict.status == Status::Stable;
            let by_tau = is_stable_by_tau_central(&x)?;
            let by_stab = is_stable_by_stabilizer(&x)?;
            if by_order == by_tau && by_tau == by_stab {
                AuditOutcome::Pass
            } else {
                AuditOutcome::Fail
            }
        } else {
            skipped("criteria assume a connected non-bipartite graph")
        },
    );
    audits.insert(
        "subcirculant".to_string(),
        if n % 2 == 1 && connected {
            audit_outcome(subcirculant_orbit_audit(set))?
        } else {
            skipped("double-cover connection set needs a connected circulant of odd order")
        },
    );

    Ok(ClassificationRecord {
        n,
        set: set.clone(),
        connected,
        bipartite,
        irreducible,
        verdict,
        arc_transitive,
        normal,
        lemma_audits: audits,
    })
}

fn subcirculant_orbit_audit(set: &ConnectionSet) -> Result<bool> {
    let cover = double_cover_connection_set(set)?;
    for orbit in connection_orbits(&cover)? {
        if !subcirculant_audit(&cover, &orbit)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderCount {
    pub order: usize,
    pub instances: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub set: ConnectionSet,
    pub status: String,
    pub aut_x: String,
    pub aut_bx: String,
}

/// Result of the main-theorem sweep: per-order instance counts and the list
/// of counterexamples, which the theorem says must be empty.
#[derive(Clone, Debug, Serialize)]
pub struct TheoremReport {
    pub max_order: usize,
    pub per_order: Vec<OrderCount>,
    pub instances: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl TheoremReport {
    pub fn holds(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Checks that every connected irreducible circulant of odd order up to
/// `max_order` (one representative per multiplier class) is stable with
/// |Aut(B(X))| = 2·|Aut(X)| exactly.
pub fn verify_main_theorem(max_order: usize, order_cap: usize) -> Result<TheoremReport> {
    if max_order % 2 == 0 {
        return Err(Error::Validation(format!(
            "the theorem quantifies over odd orders; {} is even",
            max_order
        )));
    }
    if max_order < 3 {
        return Err(Error::Validation(format!(
            "max order must be at least 3, got {}",
            max_order
        )));
    }
    if max_order > order_cap {
        return Err(Error::Capacity(format!(
            "max order {} exceeds the configured cap {}",
            max_order, order_cap
        )));
    }
    let mut per_order = Vec::new();
    let mut instances = 0;
    let mut counterexamples = Vec::new();
    for n in (3..=max_order).step_by(2) {
        let mut count = 0;
        for set in enumerate_connection_sets(n, true)? {
            let x = circulant(&set)?;
            if !x.is_connected() || !x.is_irreducible() {
                continue;
            }
            count += 1;
            let verdict = is_stable_by_order(&x)?;
            let exact =
                verdict.status == Status::Stable && verdict.aut_bx_order == 2 * verdict.aut_x_order;
            if !exact {
                counterexamples.push(Counterexample {
                    set: set.clone(),
                    status: verdict.status.as_str().to_string(),
                    aut_x: verdict.aut_x_order.to_string(),
                    aut_bx: verdict.aut_bx_order.to_string(),
                });
            }
        }
        instances += count;
        per_order.push(OrderCount {
            order: n,
            instances: count,
        });
    }
    Ok(TheoremReport {
        max_order,
        per_order,
        instances,
        counterexamples,
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Parity {
    Odd,
    Even,
    All,
}

impl Parity {
    fn admits(self, n: usize) -> bool {
        match self {
            Parity::Odd => n % 2 == 1,
            Parity::Even => n % 2 == 0,
            Parity::All => true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub min_order: usize,
    pub max_order: usize,
    pub parity: Parity,
    pub dedup: bool,
    pub jobs: usize,
    pub order_cap: usize,
}

impl SweepOptions {
    pub fn validate(&self) -> Result<()> {
        if self.jobs == 0 {
            return Err(Error::Validation("worker count must be positive".into()));
        }
        if self.min_order < 2 || self.min_order > self.max_order {
            return Err(Error::Validation(format!(
                "bad order range {}..{}",
                self.min_order, self.max_order
            )));
        }
        if self.max_order > self.order_cap {
            return Err(Error::Capacity(format!(
                "max order {} exceeds the configured cap {}",
                self.max_order, self.order_cap
            )));
        }
        Ok(())
    }
}

impl Default for SweepOptions {
    fn default() -> SweepOptions {
        SweepOptions {
            min_order: 3,
            max_order: 9,
            parity: Parity::All,
            dedup: true,
            jobs: 1,
            order_cap: DEFAULT_SWEEP_ORDER_CAP,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub records: Vec<ClassificationRecord>,
}

impl SweepReport {
    pub fn audit_failures(&self) -> usize {
        self.records.iter().map(|r| r.audit_failures()).sum()
    }

    /// One JSON object per record, in (order, set) order.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for record in &self.records {
            out.push_str(&serde_json::to_string(record).expect("records serialize"));
            out.push('\n');
        }
        out
    }

    /// Per-order verdict counts plus the audit-failure count, which a sound
    /// build keeps at zero.
    pub fn summary_csv(&self) -> String {
        let mut orders: BTreeMap<usize, [usize; 5]> = BTreeMap::new();
        for r in &self.records {
            let row = orders.entry(r.n).or_insert([0; 5]);
            row[0] += 1;
            match r.verdict.status {
                Status::Stable => row[1] += 1,
                Status::TriviallyUnstable => row[2] += 1,
                Status::NontriviallyUnstable => row[3] += 1,
                Status::NotApplicable => row[4] += 1,
            }
        }
        let mut out = String::from(
            "order,instances,stable,trivially_unstable,nontrivially_unstable,not_applicable,audit_failures\n",
        );
        for (n, row) in orders {
            let failures: usize = self
                .records
                .iter()
                .filter(|r| r.n == n)
                .map(|r| r.audit_failures())
                .sum();
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                n, row[0], row[1], row[2], row[3], row[4], failures
            ));
        }
        out
    }

    /// Writes the JSONL records to `path` and the CSV summary next to it
    /// (see [`summary_path`]). Returns both paths.
    pub fn write_files(&self, path: &Path) -> Result<(PathBuf, PathBuf)> {
        let jsonl_path = path.to_path_buf();
        let csv_path = summary_path(path);
        fs::write(&jsonl_path, self.to_jsonl())?;
        fs::write(&csv_path, self.summary_csv())?;
        Ok((jsonl_path, csv_path))
    }
}

/// Where a sweep's CSV summary lands relative to its JSONL path: the
/// extension replaced by `csv`, or `summary.csv` when that would collide.
pub fn summary_path(jsonl_path: &Path) -> PathBuf {
    let csv_path = jsonl_path.with_extension("csv");
    if csv_path == jsonl_path {
        jsonl_path.with_extension("summary.csv")
    } else {
        csv_path
    }
}

/// Classifies every instance in the configured order range. Instances are
/// independent work items; with `jobs > 1` they are distributed over a
/// worker pool and reassembled by index, so reports are byte-identical
/// regardless of worker count.
pub fn run_sweep(opts: &SweepOptions) -> Result<SweepReport> {
    run_sweep_with(opts, |_| Ok(()))
}

/// Like [`run_sweep`], additionally handing each finished record to `sink`
/// in deterministic (order, set) order. Orders are processed one at a time
/// (instances within an order in parallel), so a consumer streaming records
/// to disk keeps every fully processed order if the run is interrupted.
pub fn run_sweep_with<F>(opts: &SweepOptions, mut sink: F) -> Result<SweepReport>
where
    F: FnMut(&ClassificationRecord) -> Result<()>,
{
    opts.validate()?;
    let mut records = Vec::new();
    for n in opts.min_order..=opts.max_order {
        if !opts.parity.admits(n) {
            continue;
        }
        let instances = enumerate_connection_sets(n, opts.dedup)?;
        let batch = analyze_all(&instances, opts.jobs)?;
        for record in &batch {
            sink(record)?;
        }
        records.extend(batch);
    }
    Ok(SweepReport { records })
}

fn analyze_all(instances: &[ConnectionSet], jobs: usize) -> Result<Vec<ClassificationRecord>> {
    if jobs <= 1 || instances.len() <= 1 {
        return instances.iter().map(analyze_one).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<ClassificationRecord>>>> =
        Mutex::new((0..instances.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(instances.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= instances.len() {
                    break;
                }
                let result = analyze_one(&instances[i]);
                slots.lock().expect("result slots poisoned")[i] = Some(result);
            });
        }
    });
    slots
        .into_inner()
        .expect("result slots poisoned")
        .into_iter()
        .map(|slot| slot.expect("every instance was analyzed"))
        .collect()
}
