use std::fmt;
use std::str::FromStr;

/// One of the four architectural layers, numbered bottom-up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LayerId {
    Physical = 1,
    Logical = 2,
    Service = 3,
    Functional = 4,
}

impl LayerId {
    /// Bottom-up order: physical first.
    pub const ALL: [LayerId; 4] = [
        LayerId::Physical,
        LayerId::Logical,
        LayerId::Service,
        LayerId::Functional,
    ];

    /// Top-down order: functional first.
    pub const TOP_DOWN: [LayerId; 4] = [
        LayerId::Functional,
        LayerId::Service,
        LayerId::Logical,
        LayerId::Physical,
    ];

    pub fn index(self) -> u8 {
        self as u8
    }

    pub fn from_index(n: u8) -> Option<LayerId> {
        match n {
            1 => Some(LayerId::Physical),
            2 => Some(LayerId::Logical),
            3 => Some(LayerId::Service),
            4 => Some(LayerId::Functional),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LayerId::Physical => "physical",
            LayerId::Logical => "logical",
            LayerId::Service => "service",
            LayerId::Functional => "functional",
        }
    }

    /// The layer a projection from this layer lands on; `None` for physical.
    pub fn below(self) -> Option<LayerId> {
        LayerId::from_index(self.index() - 1)
    }

    pub fn above(self) -> Option<LayerId> {
        LayerId::from_index(self.index() + 1)
    }
}

impl fmt::Display for LayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown layer \"{0}\"")]
pub struct UnknownLayer(pub String);

impl FromStr for LayerId {
    type Err = UnknownLayer;

    /// Accepts layer names, the `system` alias for the service layer, and
    /// the numeric indices 1..=4.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "physical" | "1" => Ok(LayerId::Physical),
            "logical" | "2" => Ok(LayerId::Logical),
            "service" | "system" | "3" => Ok(LayerId::Service),
            "functional" | "4" => Ok(LayerId::Functional),
            _ => Err(UnknownLayer(s.to_string())),
        }
    }
}
