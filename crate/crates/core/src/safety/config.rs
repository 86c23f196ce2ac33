use std::fmt;
use std::str::FromStr;

/// Optional safety rule packs layered on the minimal relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pack {
    Separation,
    Replacement,
    Powerset,
    Subseteq,
}

impl Pack {
    pub const ALL: [Pack; 4] = [Pack::Separation, Pack::Replacement, Pack::Powerset, Pack::Subseteq];

    pub fn name(self) -> &'static str {
        match self {
            Pack::Separation => "separation",
            Pack::Replacement => "replacement",
            Pack::Powerset => "powerset",
            Pack::Subseteq => "subseteq",
        }
    }
}

impl FromStr for Pack {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Pack::ALL
            .into_iter()
            .find(|p| p.name() == s.trim())
            .ok_or_else(|| format!("unknown rule pack `{s}` (expected separation, replacement, powerset or subseteq)"))
    }
}

/// Which safety rules are in force.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TheoryConfig {
    pub tc: bool,
    /// Accept `φ ∧ ψ ≻ X ∪ Y` also when `X ∩ Fv(ψ) = ∅`, not only when `Y ∩ Fv(φ) = ∅`.
    pub conjunction_symmetric: bool,
    pub separation: bool,
    pub replacement: bool,
    pub powerset: bool,
    pub subseteq_atom: bool,
    pub hf_constant: bool,
}

impl Default for TheoryConfig {
    fn default() -> Self {
        TheoryConfig::rst()
    }
}

impl TheoryConfig {
    pub fn rst() -> Self {
        TheoryConfig {
            tc: false,
            conjunction_symmetric: true,
            separation: false,
            replacement: false,
            powerset: false,
            subseteq_atom: false,
            hf_constant: false,
        }
    }

    pub fn pzf() -> Self {
        TheoryConfig { tc: true, ..TheoryConfig::rst() }
    }

    pub fn rst_omega() -> Self {
        TheoryConfig { hf_constant: true, ..TheoryConfig::rst() }
    }

    /// `rst`, `pzf` or `rst-omega`.
    pub fn preset(name: &str) -> Option<Self> {
        match name.trim() {
            "rst" => Some(TheoryConfig::rst()),
            "pzf" => Some(TheoryConfig::pzf()),
            "rst-omega" => Some(TheoryConfig::rst_omega()),
            _ => None,
        }
    }

    /// Switches the base theory, keeping enabled packs and the conjunction mode.
    pub fn set_base(&mut self, name: &str) -> Result<(), String> {
        let base = TheoryConfig::preset(name)
            .ok_or_else(|| format!("unknown theory `{name}` (expected rst, rst-omega or pzf)"))?;
        self.tc = base.tc;
        self.hf_constant = base.hf_constant;
        Ok(())
    }

    pub fn base_name(&self) -> &'static str {
        match (self.tc, self.hf_constant) {
            (true, _) => "pzf",
            (false, true) => "rst-omega",
            (false, false) => "rst",
        }
    }

    pub fn enable(&mut self, pack: Pack) {
        self.set_pack(pack, true);
    }

    pub fn set_pack(&mut self, pack: Pack, on: bool) {
        match pack {
            Pack::Separation => self.separation = on,
            Pack::Replacement => self.replacement = on,
            Pack::Powerset => self.powerset = on,
            Pack::Subseteq => self.subseteq_atom = on,
        }
    }

    pub fn with(mut self, pack: Pack) -> Self {
        self.enable(pack);
        self
    }

    pub fn has(&self, pack: Pack) -> bool {
        match pack {
            Pack::Separation => self.separation,
            Pack::Replacement => self.replacement,
            Pack::Powerset => self.powerset,
            Pack::Subseteq => self.subseteq_atom,
        }
    }

    pub fn packs(&self) -> Vec<Pack> {
        Pack::ALL.into_iter().filter(|p| self.has(*p)).collect()
    }
}

impl fmt::Display for TheoryConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.base_name())?;
        for p in self.packs() {
            write!(f, "+{}", p.name())?;
        }
        if !self.conjunction_symmetric {
            f.write_str(" (one-sided ∧)")?;
        }
        Ok(())
    }
}
