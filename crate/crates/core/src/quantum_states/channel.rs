use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Angular-momentum channel `(ℓ, ℓ₃)` with `|ℓ₃| ≤ ℓ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Channel {
    pub l: i64,
    pub l3: i64,
}

impl Channel {
    pub fn new(l: i64, l3: i64) -> Result<Self> {
        let c = Channel { l, l3 };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.l < 0 || self.l3.abs() > self.l {
            return Err(Error::IncompatibleChannels { l: self.l, l3: self.l3 });
        }
        Ok(())
    }
}
