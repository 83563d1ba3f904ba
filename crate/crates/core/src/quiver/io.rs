use serde::{Deserialize, Serialize};

use super::Quiver;
use crate::error::{Error, Result};

/// On-disk form; ids are the printed labels `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuiverFile {
    pub m: u32,
    pub sinks: Vec<u64>,
    pub sources: Vec<u64>,
    pub arrows: Vec<[u64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colors: Option<Vec<u32>>,
}

impl QuiverFile {
    pub fn from_quiver(q: &Quiver) -> Self {
        let id = |v: usize| v as u64 + 1;
        QuiverFile {
            m: q.m(),
            sinks: q.sink_range().map(id).collect(),
            sources: q.source_range().map(id).collect(),
            arrows: q
                .arrows()
                .iter()
                .map(|a| [id(a.source), id(a.target)])
                .collect(),
            colors: Some(q.arrows().iter().map(|a| a.color).collect()),
        }
    }

    pub fn to_quiver(&self) -> Result<Quiver> {
        let colors: Vec<Option<u32>> = match &self.colors {
            Some(c) if c.len() != self.arrows.len() => {
                return Err(Error::Format(format!(
                    "{} colors for {} arrows",
                    c.len(),
                    self.arrows.len()
                )))
            }
            Some(c) => c.iter().map(|&x| Some(x)).collect(),
            None => vec![None; self.arrows.len()],
        };
        let arrows: Vec<_> = self
            .arrows
            .iter()
            .zip(colors)
            .map(|(a, c)| (a[0], a[1], c))
            .collect();
        Ok(Quiver::from_ids(self.m, &self.sinks, &self.sources, &arrows)?.0)
    }
}

impl Quiver {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&QuiverFile::from_quiver(self)).expect("quiver serializes")
    }

    pub fn from_json(text: &str) -> Result<Quiver> {
        let f: QuiverFile =
            serde_json::from_str(text).map_err(|e| Error::Format(format!("quiver file: {e}")))?;
        f.to_quiver()
    }
}
