use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::CorpusError;

const SHIPPED_TABLE: &str = include_str!("../../data/refactoring_kinds.tsv");

macro_rules! kinds {
    ($($variant:ident => $name:literal,)*) => {
        /// The closed catalog of refactoring kinds understood by the miner.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum RefactoringKind {
            $($variant,)*
        }

        impl RefactoringKind {
            pub const ALL: &'static [RefactoringKind] = &[$(RefactoringKind::$variant,)*];

            pub fn name(self) -> &'static str {
                match self {
                    $(RefactoringKind::$variant => $name,)*
                }
            }
        }
    };
}

kinds! {
    ChangePackage => "Change Package",
    ExtractAndMoveMethod => "Extract And Move Method",
    ExtractClass => "Extract Class",
    ExtractInterface => "Extract Interface",
    ExtractMethod => "Extract Method",
    ExtractSubclass => "Extract Subclass",
    ExtractSuperclass => "Extract Superclass",
    ExtractVariable => "Extract Variable",
    InlineMethod => "Inline Method",
    InlineVariable => "Inline Variable",
    MoveAndRenameAttribute => "Move And Rename Attribute",
    MoveAndRenameClass => "Move And Rename Class",
    MoveAttribute => "Move Attribute",
    MoveClass => "Move Class",
    MoveMethod => "Move Method",
    MoveSourceFolder => "Move Source Folder",
    ParameterizeVariable => "Parameterize Variable",
    PullUpAttribute => "Pull Up Attribute",
    PullUpMethod => "Pull Up Method",
    PushDownAttribute => "Push Down Attribute",
    PushDownMethod => "Push Down Method",
    RenameAttribute => "Rename Attribute",
    RenameClass => "Rename Class",
    RenameMethod => "Rename Method",
    RenameParameter => "Rename Parameter",
    RenameVariable => "Rename Variable",
    ReplaceAttribute => "Replace Attribute",
    ReplaceVariableWithAttribute => "Replace Variable With Attribute",
}

fn canonical_key(s: &str) -> String {
    s.replace('&', " and ")
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

impl FromStr for RefactoringKind {
    type Err = CorpusError;

    /// Case-insensitive; `&` is accepted for `And`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = canonical_key(s);
        RefactoringKind::ALL
            .iter()
            .copied()
            .find(|k| canonical_key(k.name()) == key)
            .ok_or_else(|| CorpusError::UnknownRefactoringKind(s.to_owned()))
    }
}

impl fmt::Display for RefactoringKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for RefactoringKind {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for RefactoringKind {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementLevel {
    Method,
    Attribute,
    Class,
    Variable,
    Parameter,
    Package,
    Interface,
}

impl ElementLevel {
    pub const ALL: [ElementLevel; 7] = [
        ElementLevel::Method,
        ElementLevel::Attribute,
        ElementLevel::Class,
        ElementLevel::Variable,
        ElementLevel::Parameter,
        ElementLevel::Package,
        ElementLevel::Interface,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ElementLevel::Method => "method",
            ElementLevel::Attribute => "attribute",
            ElementLevel::Class => "class",
            ElementLevel::Variable => "variable",
            ElementLevel::Parameter => "parameter",
            ElementLevel::Package => "package",
            ElementLevel::Interface => "interface",
        }
    }
}

impl FromStr for ElementLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        ElementLevel::ALL
            .iter()
            .copied()
            .find(|l| l.name() == s)
            .ok_or_else(|| format!("unknown element level {s:?}"))
    }
}

/// Kind to element-level mapping. Loaded from a `kind<TAB>level` table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KindTable {
    levels: BTreeMap<RefactoringKind, ElementLevel>,
}

impl KindTable {
    /// Parses a table. Every kind of the catalog must be mapped exactly once.
    pub fn from_tsv(text: &str) -> Result<Self, CorpusError> {
        let mut levels = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |reason: String| CorpusError::MalformedKindTable {
                line: idx + 1,
                reason,
            };
            let (kind, level) = line
                .split_once('\t')
                .ok_or_else(|| bad("expected kind<TAB>level".into()))?;
            let kind: RefactoringKind = kind.parse().map_err(|e: CorpusError| bad(e.to_string()))?;
            let level: ElementLevel = level.parse().map_err(bad)?;
            if levels.insert(kind, level).is_some() {
                return Err(bad(format!("duplicate kind {kind}")));
            }
        }
        if let Some(missing) = RefactoringKind::ALL.iter().find(|k| !levels.contains_key(k)) {
            return Err(CorpusError::MalformedKindTable {
                line: 0,
                reason: format!("kind {missing} is not mapped"),
            });
        }
        Ok(KindTable { levels })
    }

    pub fn level(&self, kind: RefactoringKind) -> ElementLevel {
        self.levels[&kind]
    }
}

impl Default for KindTable {
    fn default() -> Self {
        KindTable::from_tsv(SHIPPED_TABLE).expect("shipped kind table is valid")
    }
}
