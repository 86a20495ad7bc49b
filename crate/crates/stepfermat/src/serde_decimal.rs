//! Serde adapters that move [`Natural`] values across process boundaries as
//! canonical decimal strings, so JSON stays bit-exact and language-neutral.

pub(crate) mod natural {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::{arith, Natural};

    pub fn serialize<S: Serializer>(n: &Natural, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Natural, D::Error> {
        let raw = String::deserialize(d)?;
        arith::parse_natural(&raw).map_err(serde::de::Error::custom)
    }
}
