//! Bundled benchmark datasets: one class is the target, every other row is a
//! non-target.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feature_space::{FeatureDescriptor, FeatureSchema, Pattern, Scaling};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UciDataset {
    /// Iris, setosa as target.
    Iris,
    /// Breast Cancer Wisconsin (original), benign as target.
    BreastWisconsin,
    /// Ecoli, periplasm (pp) as target.
    Ecoli,
    /// Pima Indians Diabetes, negative as target.
    Diabetes,
}

impl UciDataset {
    pub const ALL: [UciDataset; 4] = [
        UciDataset::Iris,
        UciDataset::BreastWisconsin,
        UciDataset::Ecoli,
        UciDataset::Diabetes,
    ];

    pub fn name(self) -> &'static str {
        match self {
            UciDataset::Iris => "iris",
            UciDataset::BreastWisconsin => "breast_wisconsin",
            UciDataset::Ecoli => "ecoli",
            UciDataset::Diabetes => "diabetes",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|d| d.name() == name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown dataset `{name}`")))
    }

    fn csv(self) -> &'static str {
        match self {
            UciDataset::Iris => include_str!("../../data/uci/iris.csv"),
            UciDataset::BreastWisconsin => include_str!("../../data/uci/breast_wisconsin.csv"),
            UciDataset::Ecoli => include_str!("../../data/uci/ecoli.csv"),
            UciDataset::Diabetes => include_str!("../../data/uci/diabetes.csv"),
        }
    }

    /// Quantitative schema (standardized scaling) and raw labeled rows.
    pub fn load(self) -> Result<LabeledTable> {
        parse_table(self.csv())
    }
}

/// Raw rows of a numeric table with a trailing 0/1 `target` column.
#[derive(Debug, Clone)]
pub struct LabeledTable {
    pub schema: FeatureSchema,
    pub rows: Vec<(Pattern, bool)>,
}

pub fn parse_table(text: &str) -> Result<LabeledTable> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::Format("empty table".into()))?
        .split(',')
        .map(str::trim)
        .collect();
    if header.last() != Some(&"target") || header.len() < 2 {
        return Err(Error::Format("last column must be `target`".into()));
    }
    let m = header.len() - 1;
    let schema = FeatureSchema::new(
        header[..m]
            .iter()
            .map(|n| FeatureDescriptor::quantitative(*n).with_scaling(Scaling::Standardize))
            .collect(),
    )?;
    let rows = lines
        .enumerate()
        .map(|(i, line)| {
            let row = i + 2;
            let cells: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Row {
                    row,
                    message: e.to_string(),
                })?;
            if cells.len() != m + 1 {
                return Err(Error::Row {
                    row,
                    message: format!("{} cells, expected {}", cells.len(), m + 1),
                });
            }
            Ok((Pattern::scalars(&cells[..m]), cells[m] == 1.0))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LabeledTable { schema, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_tables() {
        let expected = [(150, 4, 50), (683, 9, 444), (336, 7, 52), (768, 8, 500)];
        for (d, (n, m, targets)) in UciDataset::ALL.into_iter().zip(expected) {
            let t = d.load().unwrap();
            assert_eq!(t.rows.len(), n, "{}", d.name());
            assert_eq!(t.schema.len(), m);
            assert_eq!(t.rows.iter().filter(|r| r.1).count(), targets);
            assert_eq!(UciDataset::parse(d.name()).unwrap(), d);
        }
    }

    #[test]
    fn malformed() {
        assert!(parse_table("a,b\n1,2\n").is_err());
        assert!(matches!(parse_table("a,target\n1,x\n"), Err(Error::Row { row: 2, .. })));
    }
}
