//! Integers on the wire: JSON numbers while they fit in 64 bits, exact
//! decimal strings beyond that.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
pub(crate) enum IntRepr {
    Small(i64),
    Big(String),
}

impl From<&BigInt> for IntRepr {
    fn from(v: &BigInt) -> Self {
        match v.to_i64() {
            Some(x) => IntRepr::Small(x),
            None => IntRepr::Big(v.to_string()),
        }
    }
}

impl IntRepr {
    pub(crate) fn into_bigint<E: serde::de::Error>(self) -> Result<BigInt, E> {
        match self {
            IntRepr::Small(x) => Ok(BigInt::from(x)),
            IntRepr::Big(s) => s
                .parse()
                .map_err(|_| E::custom(format!("invalid integer string {s:?}"))),
        }
    }
}

pub(crate) fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    IntRepr::from(v).serialize(s)
}

pub(crate) fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
    IntRepr::deserialize(d)?.into_bigint()
}
