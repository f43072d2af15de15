//! The `kind:key=val,...` mini-grammar shared by series, permutation, set
//! and sampling arguments.
//!
//! Values never contain `,` or `=`; lists inside a value use `;`
//! (`flip:cuts=0;2;5,tail=3`). The canonical form sorts keys.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Descriptor {
    pub kind: String,
    pub params: BTreeMap<String, String>,
}

impl Descriptor {
    pub fn new(kind: &str) -> Self {
        Descriptor { kind: kind.into(), params: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.params.insert(key.into(), value.to_string());
        self
    }

    /// Typed access that remembers which keys were read, so stray keys can be
    /// rejected.
    pub fn reader(&self) -> Reader<'_> {
        Reader { d: self, used: Vec::new() }
    }
}

impl FromStr for Descriptor {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        let (kind, rest) = match s.split_once(':') {
            Some((k, r)) => (k, Some(r)),
            None => (s, None),
        };
        if kind.is_empty() || !kind.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(CliError::Usage(format!("bad descriptor kind '{kind}' in '{s}'")));
        }
        let mut params = BTreeMap::new();
        if let Some(rest) = rest {
            for item in rest.split(',') {
                let (k, v) = item
                    .split_once('=')
                    .ok_or_else(|| CliError::Usage(format!("expected key=value, got '{item}' in '{s}'")))?;
                let (k, v) = (k.trim(), v.trim());
                if k.is_empty() || v.is_empty() {
                    return Err(CliError::Usage(format!("empty key or value in '{item}'")));
                }
                if params.insert(k.to_string(), v.to_string()).is_some() {
                    return Err(CliError::Usage(format!("key '{k}' repeated in '{s}'")));
                }
            }
        }
        Ok(Descriptor { kind: kind.to_string(), params })
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.kind)?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            write!(f, "{}{k}={v}", if i == 0 { ':' } else { ',' })?;
        }
        Ok(())
    }
}

impl TryFrom<String> for Descriptor {
    type Error = CliError;
    fn try_from(s: String) -> Result<Self, CliError> {
        s.parse()
    }
}

impl From<Descriptor> for String {
    fn from(d: Descriptor) -> String {
        d.to_string()
    }
}

pub struct Reader<'a> {
    d: &'a Descriptor,
    used: Vec<&'a str>,
}

impl<'a> Reader<'a> {
    pub fn raw(&mut self, key: &'a str) -> Option<&'a str> {
        self.used.push(key);
        self.d.params.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&mut self, key: &'a str) -> Result<Option<T>, CliError> {
        let kind = &self.d.kind;
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|_| CliError::Usage(format!("{kind}: cannot parse {key}={v}"))))
            .transpose()
    }

    pub fn or<T: FromStr>(&mut self, key: &'a str, default: T) -> Result<T, CliError> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn need<T: FromStr>(&mut self, key: &'a str) -> Result<T, CliError> {
        self.get(key)?.ok_or_else(|| CliError::Usage(format!("{}: missing required key '{key}'", self.d.kind)))
    }

    /// `;`-separated list.
    pub fn list<T: FromStr>(&mut self, key: &'a str) -> Result<Option<Vec<T>>, CliError> {
        let kind = &self.d.kind;
        self.raw(key)
            .map(|v| {
                v.split(';')
                    .map(|x| x.trim().parse::<T>().map_err(|_| CliError::Usage(format!("{kind}: cannot parse '{x}' in {key}"))))
                    .collect()
            })
            .transpose()
    }

    /// Fails on keys that were never read.
    pub fn finish(self) -> Result<(), CliError> {
        match self.d.params.keys().find(|k| !self.used.contains(&k.as_str())) {
            Some(k) => Err(CliError::Usage(format!("{}: unknown key '{k}'", self.d.kind))),
            None => Ok(()),
        }
    }
}
