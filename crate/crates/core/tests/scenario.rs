use std::collections::{BTreeMap, BTreeSet};

use tot_core::lexicon::{Component, LexiconSpec, PerComponent, WordSpec};
use tot_core::recall::{Classification, RecallParams};
use tot_core::scenario::{
    run_trials, CorruptionEntry, DamageEntry, PrimingEntry, RunContext, ScenarioConfig, SweepSpec,
};
use tot_core::Error;

fn p(s: &str) -> tot_core::BipolarPattern {
    s.parse().unwrap()
}

fn word(id: &str, sem: &str) -> WordSpec {
    WordSpec {
        id: id.into(),
        frequency: 1.0,
        semantic: p(sem),
        lexical: p("+-+-+-+-+"),
        phonological: p("++-+--+-+"),
        extra: PerComponent::default(),
    }
}

fn base() -> ScenarioConfig {
    ScenarioConfig {
        seed: 7,
        lexicon: LexiconSpec {
            selection_threshold: 0.3,
            slots: BTreeMap::from([("first_letter".to_string(), [0, 3])]),
            words: vec![word("target", "+++-+-+--")],
            generator: None,
        },
        target: "target".into(),
        semantic_input_flip_rate: 0.0,
        recall: RecallParams {
            q: PerComponent::uniform(1.0),
            ..RecallParams::default()
        },
        damage: vec![],
        metamemory_corruption: vec![],
        priming: vec![],
        episodes_per_trial: 1,
        n_trials: 1,
        sweep: SweepSpec::default(),
    }
}

#[test]
fn perfect_conditions_single_resolved_record() {
    let records = run_trials(&base()).unwrap();
    assert_eq!(records.len(), 1);
    let r = &records[0];
    assert_eq!(r.classification, Classification::Resolved);
    assert_eq!((r.att_sem, r.att_lex, r.att_phon), (1, 1, 1));
    assert_eq!(r.total_time_ms, 3.0);
    assert_eq!(r.slot_first_letter, Some(true));
    assert_eq!(r.episode, 1);
}

#[test]
fn runs_are_deterministic() {
    let mut cfg = base();
    cfg.n_trials = 200;
    cfg.episodes_per_trial = 3;
    cfg.recall.q.phonological = 0.0;
    cfg.semantic_input_flip_rate = 2.0 / 9.0;
    cfg.damage.push(DamageEntry {
        word: "target".into(),
        component: Component::Phonological,
        d: 0.5,
        protected_slots: vec![],
    });
    assert_eq!(run_trials(&cfg).unwrap(), run_trials(&cfg).unwrap());
    cfg.seed += 1;
    let other = run_trials(&cfg).unwrap();
    cfg.seed -= 1;
    assert_ne!(run_trials(&cfg).unwrap(), other);
}

#[test]
fn heavy_phonological_damage_gives_eventual_resolutions() {
    let mut cfg = base();
    cfg.n_trials = 10_000;
    cfg.episodes_per_trial = 3;
    cfg.recall.q.phonological = 0.4;
    cfg.damage.push(DamageEntry {
        word: "target".into(),
        component: Component::Phonological,
        d: 0.9,
        protected_slots: vec![],
    });
    let records = run_trials(&cfg).unwrap();
    let eventual = records
        .iter()
        .filter(|r| r.episode > 1 && r.classification == Classification::Resolved)
        .count();
    let tot = records
        .iter()
        .filter(|r| r.classification == Classification::Tot)
        .count();
    assert!(eventual > 0, "no eventual resolutions");
    assert!(tot > 0);
    // Episode k > 1 exists only after an unresolved episode k - 1.
    for pair in records.windows(2) {
        if pair[1].episode > 1 {
            assert_eq!(pair[1].trial, pair[0].trial);
            assert_eq!(pair[1].episode, pair[0].episode + 1);
            assert_ne!(pair[0].classification, Classification::Resolved);
        }
    }
}

#[test]
fn sweep_covers_the_cartesian_product() {
    let mut cfg = base();
    cfg.n_trials = 5;
    cfg.sweep = SweepSpec {
        q: Some(vec![0.0, 0.5, 1.0]),
        d: Some(vec![0.0, 0.5]),
        flip_rate: Some(vec![0.0, 0.2]),
        ..SweepSpec::default()
    };
    let records = run_trials(&cfg).unwrap();
    let trials: BTreeSet<u64> = records.iter().map(|r| r.trial).collect();
    assert_eq!(trials, (0..60).collect());
    let coords: BTreeSet<(u64, u64)> = records
        .iter()
        .map(|r| (r.sweep_q.unwrap().to_bits(), r.sweep_d.unwrap().to_bits()))
        .collect();
    assert_eq!(coords.len(), 6);
    for r in &records {
        let point = (r.trial / 5) as usize;
        assert_eq!(r.sweep_q, Some([0.0, 0.5, 1.0][point / 4]));
        assert_eq!(r.sweep_d, Some([0.0, 0.5][point / 2 % 2]));
    }
}

#[test]
fn swept_q_overrides_phonological_cue() {
    let mut cfg = base();
    cfg.n_trials = 300;
    cfg.sweep.q = Some(vec![0.0, 5.0 / 9.0]);
    let records = run_trials(&cfg).unwrap();
    let (low, high): (Vec<_>, Vec<_>) = records.iter().partition(|r| r.sweep_q == Some(0.0));
    assert!(high.iter().all(|r| r.att_phon == 1));
    assert!(low.iter().any(|r| r.att_phon > 1));
}

#[test]
fn orthogonal_input_is_no_access() {
    let mut cfg = base();
    cfg.n_trials = 3;
    cfg.semantic_input_flip_rate = 1.0;
    cfg.episodes_per_trial = 2;
    let records = run_trials(&cfg).unwrap();
    assert_eq!(records.len(), 6);
    for r in records {
        assert_eq!(r.classification, Classification::NoAccess);
        assert_eq!(r.total_time_ms, 0.0);
        assert_eq!(r.slot_first_letter, None);
    }
}

#[test]
fn priming_redirects_selection_for_its_window() {
    // Input = target's truth. "rival" sits at overlap 7/9; primed, both
    // scores cap at 1 and the tie goes to the smaller id.
    let mut cfg = base();
    cfg.lexicon.words.push(word("rival", "+++-+-++-"));
    cfg.lexicon.words[1].phonological = p("---------");
    cfg.priming.push(PrimingEntry {
        word: "rival".into(),
        bonus: 0.5,
        decay_trials: 1,
    });
    cfg.metamemory_corruption.push(CorruptionEntry {
        word: "rival".into(),
        component: Component::Semantic,
        flips: 1,
    });
    cfg.episodes_per_trial = 2;
    cfg.n_trials = 4;
    let records = run_trials(&cfg).unwrap();
    // Episode 1 picks the primed rival whose corrupted reference blocks
    // recall; episode 2 has no bonus left and resolves the target.
    for pair in records.chunks(2) {
        assert_eq!(pair[0].classification, Classification::Tot);
        assert_eq!(pair[0].sel_completeness, 1.0);
        assert_eq!(pair[1].classification, Classification::Resolved);
    }
}

#[test]
fn validation_reports_field_paths() {
    let mut cfg = base();
    cfg.recall.q.phonological = 1.5;
    cfg.damage.push(DamageEntry {
        word: "nobody".into(),
        component: Component::Lexical,
        d: 0.2,
        protected_slots: vec!["first_letter".into()],
    });
    cfg.sweep.d = Some(vec![]);
    cfg.target = "missing".into();
    let Err(Error::InvalidConfig(errs)) = RunContext::prepare(&cfg) else {
        panic!("expected invalid config");
    };
    let paths: Vec<&str> = errs.0.iter().map(|e| e.path.as_str()).collect();
    for want in [
        "recall.q.phonological",
        "damage[0].word",
        "damage[0].protected_slots",
        "sweep.d",
        "target",
    ] {
        assert!(paths.contains(&want), "{want} missing from {paths:?}");
    }
}

#[test]
fn generation_failure_is_a_config_error() {
    let mut cfg = base();
    cfg.lexicon.words.clear();
    cfg.target = "w0".into();
    cfg.lexicon.generator = Some(tot_core::lexicon::GeneratorSpec {
        count: 4,
        lengths: PerComponent::uniform(9),
        min_pairwise_distance: 9,
        seed: Some(1),
        frequency: 1.0,
    });
    let Err(Error::InvalidConfig(errs)) = RunContext::prepare(&cfg) else {
        panic!("expected generation failure");
    };
    assert_eq!(errs.0[0].path, "lexicon.generator");
}

#[test]
fn protected_slot_keeps_first_letter_under_heavy_damage() {
    let mut cfg = base();
    cfg.n_trials = 2000;
    cfg.recall.q.phonological = 0.0;
    cfg.recall.max_attempts = PerComponent::uniform(8);
    cfg.damage.push(DamageEntry {
        word: "target".into(),
        component: Component::Phonological,
        d: 0.9,
        protected_slots: vec!["first_letter".into()],
    });
    let records = run_trials(&cfg).unwrap();
    let slot = records
        .iter()
        .filter(|r| r.slot_first_letter == Some(true))
        .count();
    let resolved = records
        .iter()
        .filter(|r| r.classification == Classification::Resolved)
        .count();
    assert!(slot >= resolved);
}
