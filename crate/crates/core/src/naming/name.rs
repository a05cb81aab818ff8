use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::{Error, Result};

pub const SEPARATOR: char = '/';

/// A content name such as `Cambridge/ComputerLab/FW01/Windows`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HierarchicalName {
    fields: Vec<String>,
}

impl HierarchicalName {
    pub fn new<I, S>(fields: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let fields: Vec<String> = fields.into_iter().map(Into::into).collect();
        if fields.is_empty() {
            return Err(Error::Parse("a name needs at least one field".into()));
        }
        for (i, f) in fields.iter().enumerate() {
            if f.is_empty() {
                return Err(Error::Parse(alloc::format!("field {} is empty", i + 1)));
            }
            if f.contains(SEPARATOR) {
                return Err(Error::Parse(alloc::format!("field {f:?} contains '/'")));
            }
        }
        Ok(HierarchicalName { fields })
    }

    pub fn fields(&self) -> &[String] {
        &self.fields
    }

    pub fn depth(&self) -> usize {
        self.fields.len()
    }

    /// Characters in the name, separators excluded.
    pub fn char_count(&self) -> usize {
        self.fields.iter().map(|f| f.chars().count()).sum()
    }

    /// UTF-8 bytes in the name, separators excluded.
    pub fn byte_len(&self) -> usize {
        self.fields.iter().map(String::len).sum()
    }

    /// The first `len` fields.
    pub fn prefix(&self, len: usize) -> Option<HierarchicalName> {
        (1..=self.depth()).contains(&len).then(|| HierarchicalName {
            fields: self.fields[..len].to_vec(),
        })
    }
}

impl FromStr for HierarchicalName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Parse("empty name".into()));
        }
        Self::new(s.split(SEPARATOR).map(ToString::to_string))
    }
}

impl fmt::Display for HierarchicalName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, field) in self.fields.iter().enumerate() {
            if i > 0 {
                f.write_str("/")?;
            }
            f.write_str(field)?;
        }
        Ok(())
    }
}
