//! MITRE ATT&CK tactic taxonomy and the C1-C5 class grouping.
//!
//! The 14 enterprise tactics are embedded with their technique counts and a
//! one-line description; nothing is fetched from the network. Twelve of the
//! fourteen tactics are grouped into five classification targets (C1-C5);
//! reconnaissance and discovery belong to no class and are rejected as
//! training labels.

use serde::{Deserialize, Serialize};
use std::fmt;

/// One of the 14 top-level ATT&CK tactics (branches).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MitreTactic {
    Reconnaissance,
    ResourceDevelopment,
    InitialAccess,
    Execution,
    Persistence,
    PrivilegeEscalation,
    DefenseEvasion,
    CredentialAccess,
    Discovery,
    LateralMovement,
    Collection,
    CommandAndControl,
    Exfiltration,
    Impact,
}

impl MitreTactic {
    pub const ALL: [MitreTactic; 14] = [
        MitreTactic::Reconnaissance,
        MitreTactic::ResourceDevelopment,
        MitreTactic::InitialAccess,
        MitreTactic::Execution,
        MitreTactic::Persistence,
        MitreTactic::PrivilegeEscalation,
        MitreTactic::DefenseEvasion,
        MitreTactic::CredentialAccess,
        MitreTactic::Discovery,
        MitreTactic::LateralMovement,
        MitreTactic::Collection,
        MitreTactic::CommandAndControl,
        MitreTactic::Exfiltration,
        MitreTactic::Impact,
    ];

    /// Canonical lowercase hyphenated name, as used in corpus label columns.
    pub fn name(self) -> &'static str {
        match self {
            MitreTactic::Reconnaissance => "reconnaissance",
            MitreTactic::ResourceDevelopment => "resource-development",
            MitreTactic::InitialAccess => "initial-access",
            MitreTactic::Execution => "execution",
            MitreTactic::Persistence => "persistence",
            MitreTactic::PrivilegeEscalation => "privilege-escalation",
            MitreTactic::DefenseEvasion => "defense-evasion",
            MitreTactic::CredentialAccess => "credential-access",
            MitreTactic::Discovery => "discovery",
            MitreTactic::LateralMovement => "lateral-movement",
            MitreTactic::Collection => "collection",
            MitreTactic::CommandAndControl => "command-and-control",
            MitreTactic::Exfiltration => "exfiltration",
            MitreTactic::Impact => "impact",
        }
    }

    /// Number of techniques under this tactic in the embedded snapshot of
    /// the enterprise matrix.
    pub fn technique_count(self) -> u32 {
        match self {
            MitreTactic::Reconnaissance => 10,
            MitreTactic::ResourceDevelopment => 7,
            MitreTactic::InitialAccess => 9,
            MitreTactic::Execution => 12,
            MitreTactic::Persistence => 19,
            MitreTactic::PrivilegeEscalation => 13,
            MitreTactic::DefenseEvasion => 40,
            MitreTactic::CredentialAccess => 15,
            MitreTactic::Discovery => 29,
            MitreTactic::LateralMovement => 9,
            MitreTactic::Collection => 17,
            MitreTactic::CommandAndControl => 16,
            MitreTactic::Exfiltration => 9,
            MitreTactic::Impact => 13,
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            MitreTactic::Reconnaissance => {
                "Gathering information about a target to plan future operations"
            }
            MitreTactic::ResourceDevelopment => {
                "Establishing accounts, infrastructure, and capabilities to support operations"
            }
            MitreTactic::InitialAccess => "Getting a first foothold inside the target network",
            MitreTactic::Execution => "Running attacker-controlled code on a system",
            MitreTactic::Persistence => "Keeping access across restarts and credential changes",
            MitreTactic::PrivilegeEscalation => "Obtaining higher-level permissions on a system",
            MitreTactic::DefenseEvasion => "Avoiding detection by security controls",
            MitreTactic::CredentialAccess => "Stealing account names, passwords, and tokens",
            MitreTactic::Discovery => "Exploring the environment to learn what can be reached",
            MitreTactic::LateralMovement => "Moving between systems inside the environment",
            MitreTactic::Collection => "Gathering data of interest to the attacker's goals",
            MitreTactic::CommandAndControl => {
                "Communicating with compromised systems to direct them"
            }
            MitreTactic::Exfiltration => "Taking stolen data out of the environment",
            MitreTactic::Impact => "Manipulating, interrupting, or destroying systems and data",
        }
    }

    /// Parse a canonical tactic name. Accepts spaces or underscores in
    /// place of hyphens, case-insensitively.
    pub fn parse(name: &str) -> Option<MitreTactic> {
        let normalized: String = name
            .trim()
            .to_lowercase()
            .chars()
            .map(|c| if c == ' ' || c == '_' { '-' } else { c })
            .collect();
        MitreTactic::ALL
            .iter()
            .copied()
            .find(|t| t.name() == normalized)
    }
}

impl fmt::Display for MitreTactic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Classification target: one of the five grouped classes.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum ClassCode {
    C1,
    C2,
    C3,
    C4,
    C5,
}

pub const NUM_CLASSES: usize = 5;

impl ClassCode {
    pub const ALL: [ClassCode; NUM_CLASSES] = [
        ClassCode::C1,
        ClassCode::C2,
        ClassCode::C3,
        ClassCode::C4,
        ClassCode::C5,
    ];

    /// Dense index 0..5, in C1 < C2 < ... < C5 order. Ties in classifier
    /// scores break toward the lowest index.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<ClassCode> {
        ClassCode::ALL.get(index).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ClassCode::C1 => "C1",
            ClassCode::C2 => "C2",
            ClassCode::C3 => "C3",
            ClassCode::C4 => "C4",
            ClassCode::C5 => "C5",
        }
    }

    /// Parse a class code, case-insensitively (`c1`..`c5`).
    pub fn parse(s: &str) -> Option<ClassCode> {
        let s = s.trim();
        if s.len() != 2 {
            return None;
        }
        let mut chars = s.chars();
        if !matches!(chars.next(), Some('c') | Some('C')) {
            return None;
        }
        match chars.next() {
            Some('1') => Some(ClassCode::C1),
            Some('2') => Some(ClassCode::C2),
            Some('3') => Some(ClassCode::C3),
            Some('4') => Some(ClassCode::C4),
            Some('5') => Some(ClassCode::C5),
            _ => None,
        }
    }

    /// The tactics grouped under this class.
    pub fn members(self) -> &'static [MitreTactic] {
        match self {
            ClassCode::C1 => &[
                MitreTactic::InitialAccess,
                MitreTactic::Execution,
                MitreTactic::Impact,
            ],
            ClassCode::C2 => &[
                MitreTactic::ResourceDevelopment,
                MitreTactic::CommandAndControl,
            ],
            ClassCode::C3 => &[MitreTactic::Persistence, MitreTactic::DefenseEvasion],
            ClassCode::C4 => &[
                MitreTactic::PrivilegeEscalation,
                MitreTactic::CredentialAccess,
                MitreTactic::LateralMovement,
            ],
            ClassCode::C5 => &[MitreTactic::Collection, MitreTactic::Exfiltration],
        }
    }
}

impl fmt::Display for ClassCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A class code together with its member tactics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TacticClass {
    pub code: ClassCode,
    pub members: &'static [MitreTactic],
}

impl TacticClass {
    pub fn of(code: ClassCode) -> TacticClass {
        TacticClass {
            code,
            members: code.members(),
        }
    }
}

/// The class containing `tactic`, or `None` for the two ungrouped tactics
/// (reconnaissance and discovery). Total and deterministic.
pub fn group_tactic(tactic: MitreTactic) -> Option<ClassCode> {
    ClassCode::ALL
        .iter()
        .copied()
        .find(|class| class.members().contains(&tactic))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn fourteen_distinct_tactics_with_expected_counts() {
        let names: BTreeSet<_> = MitreTactic::ALL.iter().map(|t| t.name()).collect();
        assert_eq!(names.len(), 14);

        let expected = [
            ("reconnaissance", 10),
            ("resource-development", 7),
            ("initial-access", 9),
            ("execution", 12),
            ("persistence", 19),
            ("privilege-escalation", 13),
            ("defense-evasion", 40),
            ("credential-access", 15),
            ("discovery", 29),
            ("lateral-movement", 9),
            ("collection", 17),
            ("command-and-control", 16),
            ("exfiltration", 9),
            ("impact", 13),
        ];
        for (name, count) in expected {
            let tactic = MitreTactic::parse(name).unwrap();
            assert_eq!(tactic.technique_count(), count, "{name}");
            assert!(!tactic.description().is_empty());
        }
    }

    #[test]
    fn grouping_matches_class_listing() {
        use ClassCode::*;
        use MitreTactic::*;
        assert_eq!(group_tactic(InitialAccess), Some(C1));
        assert_eq!(group_tactic(Execution), Some(C1));
        assert_eq!(group_tactic(Impact), Some(C1));
        assert_eq!(group_tactic(ResourceDevelopment), Some(C2));
        assert_eq!(group_tactic(CommandAndControl), Some(C2));
        assert_eq!(group_tactic(Persistence), Some(C3));
        assert_eq!(group_tactic(DefenseEvasion), Some(C3));
        assert_eq!(group_tactic(PrivilegeEscalation), Some(C4));
        assert_eq!(group_tactic(CredentialAccess), Some(C4));
        assert_eq!(group_tactic(LateralMovement), Some(C4));
        assert_eq!(group_tactic(Collection), Some(C5));
        assert_eq!(group_tactic(Exfiltration), Some(C5));
        assert_eq!(group_tactic(Reconnaissance), None);
        assert_eq!(group_tactic(Discovery), None);
    }

    #[test]
    fn class_members_partition_twelve_tactics() {
        let mut seen = BTreeSet::new();
        for a in ClassCode::ALL {
            for b in ClassCode::ALL {
                if a != b {
                    let overlap = a.members().iter().any(|t| b.members().contains(t));
                    assert!(!overlap, "{a} and {b} share a tactic");
                }
            }
            for &t in a.members() {
                seen.insert(t);
            }
        }
        assert_eq!(seen.len(), 12);
        assert!(!seen.contains(&MitreTactic::Reconnaissance));
        assert!(!seen.contains(&MitreTactic::Discovery));
    }

    #[test]
    fn tactic_name_parsing_tolerates_spacing_and_case() {
        assert_eq!(
            MitreTactic::parse("Defense Evasion"),
            Some(MitreTactic::DefenseEvasion)
        );
        assert_eq!(
            MitreTactic::parse("command_and_control"),
            Some(MitreTactic::CommandAndControl)
        );
        assert_eq!(MitreTactic::parse("no-such-tactic"), None);
    }

    #[test]
    fn class_code_parsing() {
        assert_eq!(ClassCode::parse("c3"), Some(ClassCode::C3));
        assert_eq!(ClassCode::parse("C5"), Some(ClassCode::C5));
        assert_eq!(ClassCode::parse("C6"), None);
        assert_eq!(ClassCode::parse("class1"), None);
        for (i, code) in ClassCode::ALL.iter().enumerate() {
            assert_eq!(code.index(), i);
            assert_eq!(ClassCode::from_index(i), Some(*code));
        }
    }
}
