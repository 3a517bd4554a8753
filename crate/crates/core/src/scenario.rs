//! Declarative scenarios, sweeps and the per-trial Monte Carlo step.
//!
//! A trial owns a child stream keyed by `(seed, sweep point, trial)`. With
//! it the trial damages its own copies of the planned networks, draws the
//! corrupted semantic input and runs up to `episodes_per_trial` recall
//! episodes, stopping at the first resolution. Records therefore depend on
//! the configuration and seed only, never on how trials are scheduled.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, FieldError, FieldErrors, Result};
use crate::lexicon::{
    build_lexicon, corrupt_input, Component, GeneratorSpec, Lexicon, LexiconSpec, PrimingState,
};
use crate::pattern::SlotMap;
use crate::recall::{recall_word, Classification, RecallParams};
use crate::stream::{child_seed, keys, stream, Stream};

/// Slot reported in the `slot_first_letter` record column.
pub const FIRST_LETTER_SLOT: &str = "first_letter";

pub const DEFAULT_EPISODES_PER_TRIAL: u32 = 1;
pub const DEFAULT_N_TRIALS: u64 = 1000;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ScenarioConfig {
    #[cfg_attr(feature = "serde", serde(default))]
    pub seed: u64,
    pub lexicon: LexiconSpec,
    /// Word whose semantic truth seeds the trial's input.
    pub target: String,
    #[cfg_attr(feature = "serde", serde(default))]
    pub semantic_input_flip_rate: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub recall: RecallParams,
    #[cfg_attr(feature = "serde", serde(default))]
    pub damage: Vec<DamageEntry>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub metamemory_corruption: Vec<CorruptionEntry>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub priming: Vec<PrimingEntry>,
    #[cfg_attr(feature = "serde", serde(default = "default_episodes"))]
    pub episodes_per_trial: u32,
    #[cfg_attr(feature = "serde", serde(default = "default_n_trials"))]
    pub n_trials: u64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub sweep: SweepSpec,
}

#[cfg(feature = "serde")]
fn default_episodes() -> u32 {
    DEFAULT_EPISODES_PER_TRIAL
}

#[cfg(feature = "serde")]
fn default_n_trials() -> u64 {
    DEFAULT_N_TRIALS
}

/// Weight damage for one component of one word, drawn anew per trial.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct DamageEntry {
    pub word: String,
    pub component: Component,
    pub d: f64,
    /// Phonological slots kept out of damage and masking.
    #[cfg_attr(feature = "serde", serde(default))]
    pub protected_slots: Vec<String>,
}

/// Flips in a metamemory reference, drawn once per run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct CorruptionEntry {
    pub word: String,
    pub component: Component,
    pub flips: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct PrimingEntry {
    pub word: String,
    pub bonus: f64,
    /// Number of selections (episodes) within a trial that see the bonus.
    pub decay_trials: u32,
}

/// Optional grids; the run covers their cartesian product.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct SweepSpec {
    #[cfg_attr(feature = "serde", serde(default))]
    pub q: Option<Vec<f64>>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub d: Option<Vec<f64>>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub flip_rate: Option<Vec<f64>>,
    /// Components whose cue fraction the `q` axis overrides.
    #[cfg_attr(feature = "serde", serde(default = "default_swept_components"))]
    pub q_components: Vec<Component>,
    /// Components of the target word whose damage the `d` axis overrides.
    #[cfg_attr(feature = "serde", serde(default = "default_swept_components"))]
    pub d_components: Vec<Component>,
}

fn default_swept_components() -> Vec<Component> {
    vec![Component::Phonological]
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            q: None,
            d: None,
            flip_rate: None,
            q_components: default_swept_components(),
            d_components: default_swept_components(),
        }
    }
}

/// One grid point; `None` on an axis the sweep does not declare.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub index: usize,
    pub q: Option<f64>,
    pub d: Option<f64>,
    pub flip_rate: Option<f64>,
}

impl SweepSpec {
    /// Cartesian product in `q`-major, then `d`, then `flip_rate` order.
    pub fn points(&self) -> Vec<SweepPoint> {
        let axis = |g: &Option<Vec<f64>>| match g {
            Some(v) => v.iter().map(|&x| Some(x)).collect::<Vec<_>>(),
            None => vec![None],
        };
        let mut out = Vec::new();
        for &q in &axis(&self.q) {
            for &d in &axis(&self.d) {
                for &flip_rate in &axis(&self.flip_rate) {
                    out.push(SweepPoint {
                        index: out.len(),
                        q,
                        d,
                        flip_rate,
                    });
                }
            }
        }
        out
    }
}

/// One row of emitted results: one recall episode of one trial.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrialRecord {
    /// Run-wide trial index: `point · n_trials + trial`.
    pub trial: u64,
    pub sweep_q: Option<f64>,
    pub sweep_d: Option<f64>,
    /// 1-based.
    pub episode: u32,
    pub classification: Classification,
    pub sel_completeness: f64,
    pub att_sem: u32,
    pub att_lex: u32,
    pub att_phon: u32,
    pub tot_strength: f64,
    /// `None` when no node was selected or the node has no such slot.
    pub slot_first_letter: Option<bool>,
    pub total_time_ms: f64,
    /// Seed of the trial's child stream.
    pub seed_child: u64,
}

fn in_unit(v: f64) -> bool {
    (0.0..=1.0).contains(&v)
}

struct Errs(Vec<FieldError>);

impl Errs {
    fn check(&mut self, ok: bool, path: impl Into<String>, message: impl Into<String>) {
        if !ok {
            self.0.push(FieldError {
                path: path.into(),
                message: message.into(),
            });
        }
    }
}

impl ScenarioConfig {
    /// Checks every range and cross-reference; errors carry field paths.
    pub fn validate(&self) -> core::result::Result<(), FieldErrors> {
        let mut e = Errs(Vec::new());
        let lex = &self.lexicon;
        e.check(
            lex.selection_threshold > 0.0 && lex.selection_threshold <= 1.0,
            "lexicon.selection_threshold",
            "must lie in (0, 1]",
        );
        let mut lengths: Option<[usize; 3]> = None;
        let mut ids: Vec<String> = Vec::new();
        for (i, w) in lex.words.iter().enumerate() {
            let path = format!("lexicon.words[{i}]");
            e.check(
                !ids.contains(&w.id),
                format!("{path}.id"),
                format!("duplicate word id {:?}", w.id),
            );
            ids.push(w.id.clone());
            e.check(
                w.frequency >= 0.0,
                format!("{path}.frequency"),
                "must be non-negative",
            );
            let lens = [w.semantic.len(), w.lexical.len(), w.phonological.len()];
            match lengths {
                None => lengths = Some(lens),
                Some(expect) => {
                    for c in Component::ALL {
                        e.check(
                            lens[c.index()] == expect[c.index()],
                            format!("{path}.{c}"),
                            format!(
                                "length {} differs from {}",
                                lens[c.index()],
                                expect[c.index()]
                            ),
                        );
                    }
                }
            }
            for c in Component::ALL {
                for (k, x) in w.extra.get(c).iter().enumerate() {
                    e.check(
                        x.len() == lens[c.index()],
                        format!("{path}.extra.{c}[{k}]"),
                        format!("length {} differs from {}", x.len(), lens[c.index()]),
                    );
                }
            }
        }
        if let Some(g) = &lex.generator {
            let glens = [
                g.lengths.semantic,
                g.lengths.lexical,
                g.lengths.phonological,
            ];
            e.check(
                g.count >= 1,
                "lexicon.generator.count",
                "must be at least 1",
            );
            e.check(
                g.frequency >= 0.0,
                "lexicon.generator.frequency",
                "must be non-negative",
            );
            for c in Component::ALL {
                e.check(
                    glens[c.index()] >= 1,
                    format!("lexicon.generator.lengths.{c}"),
                    "must be at least 1",
                );
                if let Some(expect) = lengths {
                    e.check(
                        glens[c.index()] == expect[c.index()],
                        format!("lexicon.generator.lengths.{c}"),
                        format!("must equal explicit word length {}", expect[c.index()]),
                    );
                }
            }
            e.check(
                g.min_pairwise_distance <= g.lengths.semantic,
                "lexicon.generator.min_pairwise_distance",
                "exceeds the semantic length",
            );
            for i in 0..g.count {
                let id = GeneratorSpec::word_id(i);
                e.check(
                    !ids.contains(&id),
                    "lexicon.generator.count",
                    format!("generated id {id:?} collides with an explicit word"),
                );
                ids.push(id);
            }
            lengths.get_or_insert(glens);
        }
        e.check(
            lengths.is_some(),
            "lexicon.words",
            "lexicon declares no words",
        );
        let lengths = lengths.unwrap_or([1, 1, 1]);
        let phon_len = lengths[Component::Phonological.index()];
        let mut slots = SlotMap::empty(phon_len);
        for (name, [start, end]) in &lex.slots {
            if let Err(err) = slots.insert(name, *start..*end) {
                e.check(false, format!("lexicon.slots.{name}"), err.to_string());
            }
        }

        e.check(
            ids.contains(&self.target),
            "target",
            format!("unknown word {:?}", self.target),
        );
        e.check(
            in_unit(self.semantic_input_flip_rate),
            "semantic_input_flip_rate",
            "must lie in [0, 1]",
        );

        let r = &self.recall;
        for c in Component::ALL {
            e.check(
                in_unit(*r.q.get(c)),
                format!("recall.q.{c}"),
                "must lie in [0, 1]",
            );
            e.check(
                *r.max_attempts.get(c) >= 1,
                format!("recall.max_attempts.{c}"),
                "must be at least 1",
            );
        }
        e.check(
            in_unit(r.link_gain),
            "recall.link_gain",
            "must lie in [0, 1]",
        );
        e.check(
            r.spike_ms > 0.0 && r.spike_ms.is_finite(),
            "recall.spike_ms",
            "must be positive",
        );
        e.check(
            r.interval_ms >= 0.0 && r.interval_ms.is_finite(),
            "recall.interval_ms",
            "must be non-negative",
        );
        e.check(
            r.strength_threshold > 0.0 && r.strength_threshold < 1.0,
            "recall.strength_threshold",
            "must lie in (0, 1)",
        );

        let known = |w: &str| ids.iter().any(|id| id == w);
        let mut seen = BTreeSet::new();
        for (i, d) in self.damage.iter().enumerate() {
            let path = format!("damage[{i}]");
            e.check(
                known(&d.word),
                format!("{path}.word"),
                format!("unknown word {:?}", d.word),
            );
            e.check(in_unit(d.d), format!("{path}.d"), "must lie in [0, 1]");
            e.check(
                seen.insert((d.word.clone(), d.component)),
                format!("{path}.component"),
                "duplicate damage entry for this word and component",
            );
            if !d.protected_slots.is_empty() {
                e.check(
                    d.component == Component::Phonological,
                    format!("{path}.protected_slots"),
                    "slots exist only on the phonological component",
                );
            }
            for s in &d.protected_slots {
                e.check(
                    slots.get(s).is_some(),
                    format!("{path}.protected_slots"),
                    format!("unknown slot {s:?}"),
                );
            }
        }
        for (i, m) in self.metamemory_corruption.iter().enumerate() {
            let path = format!("metamemory_corruption[{i}]");
            e.check(
                known(&m.word),
                format!("{path}.word"),
                format!("unknown word {:?}", m.word),
            );
            e.check(
                m.flips <= lengths[m.component.index()],
                format!("{path}.flips"),
                "exceeds the component length",
            );
        }
        for (i, p) in self.priming.iter().enumerate() {
            let path = format!("priming[{i}]");
            e.check(
                known(&p.word),
                format!("{path}.word"),
                format!("unknown word {:?}", p.word),
            );
            e.check(
                in_unit(p.bonus),
                format!("{path}.bonus"),
                "must lie in [0, 1]",
            );
        }
        e.check(
            self.episodes_per_trial >= 1,
            "episodes_per_trial",
            "must be at least 1",
        );
        e.check(self.n_trials >= 1, "n_trials", "must be at least 1");
        for (name, grid) in [
            ("q", &self.sweep.q),
            ("d", &self.sweep.d),
            ("flip_rate", &self.sweep.flip_rate),
        ] {
            if let Some(grid) = grid {
                e.check(
                    !grid.is_empty(),
                    format!("sweep.{name}"),
                    "grid must not be empty",
                );
                for (k, &v) in grid.iter().enumerate() {
                    e.check(
                        in_unit(v),
                        format!("sweep.{name}[{k}]"),
                        "must lie in [0, 1]",
                    );
                }
            }
        }
        e.check(
            !self.sweep.q_components.is_empty(),
            "sweep.q_components",
            "must not be empty",
        );
        e.check(
            !self.sweep.d_components.is_empty(),
            "sweep.d_components",
            "must not be empty",
        );

        if e.0.is_empty() {
            Ok(())
        } else {
            Err(FieldErrors(e.0))
        }
    }

    /// Seed of the trial's child stream.
    pub fn trial_seed(&self, point: usize, trial: u64) -> u64 {
        child_seed(self.seed, &[keys::TRIAL, point as u64, trial])
    }
}

/// Damage entry with slot names resolved to indices.
#[derive(Debug, Clone, PartialEq)]
struct ResolvedDamage {
    word: usize,
    component: Component,
    d: f64,
    protected: Vec<usize>,
}

/// Validated configuration plus the lexicon every trial starts from.
#[derive(Debug, Clone)]
pub struct RunContext {
    cfg: ScenarioConfig,
    lexicon: Lexicon,
    priming: PrimingState,
    target: usize,
    damage: Vec<ResolvedDamage>,
    points: Vec<SweepPoint>,
}

impl RunContext {
    /// Validates `cfg`, builds the lexicon and applies metamemory
    /// corruption. Generation failures are reported as field errors.
    pub fn prepare(cfg: &ScenarioConfig) -> Result<Self> {
        cfg.validate().map_err(Error::InvalidConfig)?;
        let lex_seed = cfg
            .lexicon
            .generator
            .as_ref()
            .and_then(|g| g.seed)
            .unwrap_or_else(|| child_seed(cfg.seed, &[keys::LEXICON]));
        let mut lexicon = build_lexicon(&cfg.lexicon, &mut stream(lex_seed)).map_err(|err| {
            Error::InvalidConfig(FieldErrors(vec![FieldError {
                path: "lexicon.generator".into(),
                message: err.to_string(),
            }]))
        })?;
        let mut rng = stream(child_seed(cfg.seed, &[keys::CORRUPTION]));
        for m in &cfg.metamemory_corruption {
            let node = lexicon.get_mut(&m.word).expect("validated word id");
            node.corrupt_metamemory(m.component, m.flips, &mut rng)?;
        }
        let mut priming = PrimingState::default();
        for p in &cfg.priming {
            priming.prime(&lexicon, &p.word, p.bonus, p.decay_trials)?;
        }
        let damage = cfg
            .damage
            .iter()
            .map(|d| {
                let word = lexicon.position(&d.word).expect("validated word id");
                let protected = lexicon
                    .node(word)
                    .slot_map()
                    .indices_of(&d.protected_slots)?;
                Ok(ResolvedDamage {
                    word,
                    component: d.component,
                    d: d.d,
                    protected,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let target = lexicon.position(&cfg.target).expect("validated target");
        Ok(Self {
            cfg: cfg.clone(),
            lexicon,
            priming,
            target,
            damage,
            points: cfg.sweep.points(),
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    /// The lexicon after metamemory corruption, before any damage.
    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn points(&self) -> &[SweepPoint] {
        &self.points
    }

    pub fn total_trials(&self) -> u64 {
        self.points.len() as u64 * self.cfg.n_trials
    }

    fn params_at(&self, point: &SweepPoint) -> RecallParams {
        let mut params = self.cfg.recall.clone();
        if let Some(q) = point.q {
            for &c in &self.cfg.sweep.q_components {
                *params.q.get_mut(c) = q;
            }
        }
        params
    }

    fn damage_at(&self, point: Option<&SweepPoint>) -> Vec<ResolvedDamage> {
        let mut plan = self.damage.clone();
        if let Some(d) = point.and_then(|p| p.d) {
            for &c in &self.cfg.sweep.d_components {
                match plan
                    .iter_mut()
                    .find(|e| e.word == self.target && e.component == c)
                {
                    Some(entry) => entry.d = d,
                    None => plan.push(ResolvedDamage {
                        word: self.target,
                        component: c,
                        d,
                        protected: Vec::new(),
                    }),
                }
            }
        }
        plan
    }

    fn damaged_lexicon(&self, plan: &[ResolvedDamage], rng: &mut Stream) -> Result<Lexicon> {
        let mut lex = self.lexicon.clone();
        for entry in plan {
            let id = self.lexicon.node(entry.word).id().to_string();
            let node = lex.get_mut(&id).expect("word index from this lexicon");
            node.damage(entry.component, entry.d, &entry.protected, rng)?;
        }
        Ok(lex)
    }

    /// The lexicon as trial 0 of the unswept configuration sees it: the
    /// base damage plan drawn from that trial's stream.
    pub fn reference_lexicon(&self) -> Result<Lexicon> {
        let mut rng = stream(self.cfg.trial_seed(0, 0));
        self.damaged_lexicon(&self.damage_at(None), &mut rng)
    }

    /// Runs trial `trial` (0-based within the point) at sweep point `point`.
    pub fn run_trial(&self, point: &SweepPoint, trial: u64) -> Result<Vec<TrialRecord>> {
        let seed_child = self.cfg.trial_seed(point.index, trial);
        let mut rng = stream(seed_child);
        let lex = self.damaged_lexicon(&self.damage_at(Some(point)), &mut rng)?;
        let params = self.params_at(point);
        let flip_rate = point.flip_rate.unwrap_or(self.cfg.semantic_input_flip_rate);
        let truth = self.lexicon.node(self.target).truth(Component::Semantic);
        let input = corrupt_input(truth, flip_rate, &mut rng)?;
        let mut priming = self.priming.clone();
        let global_trial = point.index as u64 * self.cfg.n_trials + trial;

        let mut records = Vec::new();
        for episode in 1..=self.cfg.episodes_per_trial {
            let out = recall_word(&lex, &mut priming, &input, &params, &mut rng)?;
            let slot_first_letter = out.partial_info.get(FIRST_LETTER_SLOT).copied();
            records.push(TrialRecord {
                trial: global_trial,
                sweep_q: point.q,
                sweep_d: point.d,
                episode,
                classification: out.classification,
                sel_completeness: out.completeness,
                att_sem: out.attempts(Component::Semantic),
                att_lex: out.attempts(Component::Lexical),
                att_phon: out.attempts(Component::Phonological),
                tot_strength: out.tot_strength,
                slot_first_letter,
                total_time_ms: out.total_time_ms,
                seed_child,
            });
            if out.classification == Classification::Resolved {
                break;
            }
        }
        Ok(records)
    }
}

/// Sequential reference runner: every point, every trial, in order.
pub fn run_trials(cfg: &ScenarioConfig) -> Result<Vec<TrialRecord>> {
    let ctx = RunContext::prepare(cfg)?;
    let mut out = Vec::new();
    for point in ctx.points() {
        for t in 0..cfg.n_trials {
            out.extend(ctx.run_trial(point, t)?);
        }
    }
    Ok(out)
}
