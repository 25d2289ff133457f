//! `key=value` parameter lists, as used on the command line and in
//! construction specs (`s=3,m=1,l=2` or `s=3 m=1 l=2`).

use std::collections::BTreeMap;

use crate::error::{params, Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KeyValues(BTreeMap<String, String>);

impl KeyValues {
    pub fn parse<'a, I: IntoIterator<Item = &'a str>>(tokens: I) -> Result<Self> {
        let mut map = BTreeMap::new();
        for tok in tokens {
            for piece in tok.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                let (k, v) = piece
                    .split_once('=')
                    .ok_or_else(|| Error::Params(format!("expected key=value, found `{piece}`")))?;
                if map
                    .insert(k.trim().to_string(), v.trim().to_string())
                    .is_some()
                {
                    return params(format!("parameter `{}` given twice", k.trim()));
                }
            }
        }
        Ok(KeyValues(map))
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn int(&self, key: &str) -> Result<i64> {
        let v = self
            .raw(key)
            .ok_or_else(|| Error::Params(format!("missing parameter `{key}`")))?;
        v.parse()
            .map_err(|_| Error::Params(format!("parameter `{key}` is not an integer: `{v}`")))
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        let v = self.int(key)?;
        usize::try_from(v).map_err(|_| Error::Params(format!("parameter `{key}` must be >= 0")))
    }

    pub fn int_or(&self, key: &str, default: i64) -> Result<i64> {
        if self.raw(key).is_some() {
            self.int(key)
        } else {
            Ok(default)
        }
    }

    /// Errors if any key outside `allowed` is present.
    pub fn only(&self, allowed: &[&str]) -> Result<()> {
        match self.0.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => params(format!(
                "unknown parameter `{k}` (expected {})",
                allowed.join(", ")
            )),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_mixed_separators() {
        let kv = KeyValues::parse(["s=3,m=1", "l=2"]).unwrap();
        assert_eq!(kv.int("s").unwrap(), 3);
        assert_eq!(kv.usize("l").unwrap(), 2);
        assert!(kv.int("q").is_err());
        assert_eq!(kv.int_or("q", 7).unwrap(), 7);
        assert!(kv.only(&["s", "m", "l"]).is_ok());
        assert!(kv.only(&["s"]).is_err());
    }

    #[test]
    fn rejects_garbage() {
        assert!(KeyValues::parse(["s3"]).is_err());
        assert!(KeyValues::parse(["s=3,s=4"]).is_err());
        assert!(KeyValues::parse(["s=x"]).unwrap().int("s").is_err());
        assert!(KeyValues::parse(["s=-1"]).unwrap().usize("s").is_err());
    }
}
