//! Deterministic synthetic corpora for tests and demos.
//!
//! The generated requirements plant a clean class signal: every text holds
//! two keywords exclusive to its class plus eight fillers drawn from a
//! shared pool. Any reasonable classifier should separate the classes; a
//! control corpus with uniformly random labels should score at chance.

use crate::corpus::{LabeledCorpus, LabeledRecord};
use crate::mitre::{ClassCode, NUM_CLASSES};
use crate::rng::{derive_seed, Rng};

/// Class-exclusive keyword pools, one per class.
const CLASS_KEYWORDS: [[&str; 6]; NUM_CLASSES] = [
    // C1: getting in, running code, breaking things
    ["gateway", "payload", "execute", "installer", "bootstrap", "detonate"],
    // C2: attacker infrastructure and command channels
    ["beacon", "relay", "webhook", "uplink", "proxy", "heartbeat"],
    // C3: staying resident and staying hidden
    ["autorun", "implant", "cloak", "obfuscate", "rootkit", "stealth"],
    // C4: privileges, credentials, movement
    ["privilege", "credential", "token", "sudo", "pivot", "keytab"],
    // C5: gathering and removing data
    ["harvest", "exfil", "siphon", "stash", "bundle", "offload"],
];

/// Shared filler vocabulary, common to all classes.
const FILLERS: [&str; 30] = [
    "the", "system", "shall", "provide", "support", "user", "data", "access", "service",
    "interface", "log", "report", "ensure", "allow", "secure", "network", "file", "process",
    "account", "request", "response", "policy", "control", "manage", "monitor", "store",
    "update", "verify", "session", "record",
];

/// Generate `n` labeled requirements with a planted keyword signal.
/// Classes rotate C1..C5, so `n = 500` yields 100 records per class.
/// Deterministic given `(n, seed)`.
pub fn keyword_corpus(n: usize, seed: u64) -> LabeledCorpus {
    let mut records = Vec::with_capacity(n);
    for i in 0..n {
        let class = ClassCode::from_index(i % NUM_CLASSES).expect("rotation in range");
        let mut rng = Rng::from_seed(derive_seed(seed, &[i as u64]));

        let keyword_pool = &CLASS_KEYWORDS[class.index()];
        let mut tokens: Vec<&str> = rng
            .sample_indices(keyword_pool.len(), 2)
            .into_iter()
            .map(|k| keyword_pool[k])
            .collect();
        tokens.extend(
            rng.sample_indices(FILLERS.len(), 8)
                .into_iter()
                .map(|f| FILLERS[f]),
        );
        rng.shuffle(&mut tokens);

        records.push(LabeledRecord::new(
            format!("req-{:04}", i + 1),
            tokens.join(" "),
            class,
        ));
    }
    LabeledCorpus::new(records).expect("generated ids are unique and texts non-empty")
}

/// Replace every label with a uniformly random class: the chance-level
/// control. Texts and ids are unchanged.
pub fn with_random_labels(corpus: &LabeledCorpus, seed: u64) -> LabeledCorpus {
    let mut rng = Rng::from_seed(seed);
    let records = corpus
        .records()
        .iter()
        .map(|r| {
            let class = ClassCode::from_index(rng.next_below(NUM_CLASSES as u64) as usize)
                .expect("class index in range");
            LabeledRecord::new(r.requirement.id.clone(), r.requirement.text.clone(), class)
        })
        .collect();
    LabeledCorpus::new(records).expect("relabeling preserves corpus invariants")
}
