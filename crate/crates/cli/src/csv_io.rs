//! CSV ingestion and emission for multi-sample datasets.
//!
//! Two layouts: one file per group (coordinate columns only), or a single
//! file with a group-label column. Cells must parse as finite numbers;
//! failures report the file line.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context};
use ujel_core::{Matrix, MultiSampleDataset};

use crate::{AppError, AppResult};

/// A dataset plus the labels it was assembled from.
#[derive(Debug)]
pub struct IngestedDataset {
    pub dataset: MultiSampleDataset,
    pub group_names: Vec<String>,
    pub column_names: Vec<String>,
}

fn parse_cell(raw: &str, path: &Path, line: u64, column: &str) -> anyhow::Result<f64> {
    let value: f64 = raw
        .trim()
        .parse()
        .map_err(|_| {
            anyhow!(
                "{}:{line}: cell '{raw}' in column '{column}' is not numeric",
                path.display()
            )
        })?;
    if !value.is_finite() {
        bail!(
            "{}:{line}: non-finite value in column '{column}'",
            path.display()
        );
    }
    Ok(value)
}

/// One file per group; group order follows the argument order and group
/// names are the file stems. All files must agree on the header.
pub fn ingest_multi_file(paths: &[impl AsRef<Path>]) -> AppResult<IngestedDataset> {
    if paths.len() < 2 {
        return Err(AppError::usage(
            "need at least two group files (or one file with --group-col)",
        ));
    }
    let mut columns: Option<Vec<String>> = None;
    let mut groups = Vec::new();
    let mut names = Vec::new();
    for p in paths {
        let path = p.as_ref();
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .with_context(|| format!("opening {}", path.display()))
            .map_err(AppError::Failure)?;
        let header: Vec<String> = reader
            .headers()
            .map_err(|e| AppError::Failure(e.into()))?
            .iter()
            .map(str::to_string)
            .collect();
        match &columns {
            None => columns = Some(header.clone()),
            Some(expected) if *expected != header => {
                return Err(AppError::Failure(anyhow!(
                    "{}: header {:?} does not match first file's {:?}",
                    path.display(),
                    header,
                    expected
                )))
            }
            _ => {}
        }
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| AppError::Failure(e.into()))?;
            let line = record.position().map_or(0, |p| p.line());
            let row = record
                .iter()
                .zip(columns.as_ref().unwrap())
                .map(|(cell, col)| parse_cell(cell, path, line, col))
                .collect::<anyhow::Result<Vec<f64>>>()
                .map_err(AppError::Failure)?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(AppError::Failure(anyhow!(
                "{}: no data rows",
                path.display()
            )));
        }
        groups.push(Matrix::from_rows(&rows).map_err(anyhow::Error::new)?);
        names.push(
            path.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string()),
        );
    }
    let dataset = MultiSampleDataset::new(groups).map_err(anyhow::Error::new)?;
    Ok(IngestedDataset {
        dataset,
        group_names: names,
        column_names: columns.unwrap(),
    })
}

/// Single file with a group-label column. `order` fixes the group order;
/// when absent, groups follow first appearance.
pub fn ingest_grouped_file(
    path: impl AsRef<Path>,
    group_col: &str,
    order: Option<&[String]>,
) -> AppResult<IngestedDataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))
        .map_err(AppError::Failure)?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| AppError::Failure(e.into()))?
        .iter()
        .map(str::to_string)
        .collect();
    let group_idx = header
        .iter()
        .position(|h| h == group_col)
        .ok_or_else(|| {
            AppError::usage(format!(
                "group column '{group_col}' not in header {header:?}"
            ))
        })?;
    let coord_names: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != group_idx)
        .map(|(_, h)| h.clone())
        .collect();

    let mut by_label: BTreeMap<String, Vec<Vec<f64>>> = BTreeMap::new();
    let mut appearance: Vec<String> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| AppError::Failure(e.into()))?;
        let line = record.position().map_or(0, |p| p.line());
        let label = record
            .get(group_idx)
            .ok_or_else(|| AppError::Failure(anyhow!("{}:{line}: short row", path.display())))?
            .to_string();
        let row = record
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != group_idx)
            .map(|(i, cell)| parse_cell(cell, path, line, &header[i]))
            .collect::<anyhow::Result<Vec<f64>>>()
            .map_err(AppError::Failure)?;
        if !by_label.contains_key(&label) {
            appearance.push(label.clone());
        }
        by_label.entry(label).or_default().push(row);
    }
    if by_label.is_empty() {
        return Err(AppError::Failure(anyhow!(
            "{}: no data rows",
            path.display()
        )));
    }

    let ordered: Vec<String> = match order {
        Some(names) => {
            for name in names {
                if !by_label.contains_key(name) {
                    return Err(AppError::usage(format!(
                        "--order label '{name}' not present; file has {:?}",
                        appearance
                    )));
                }
            }
            for label in by_label.keys() {
                if !names.contains(label) {
                    return Err(AppError::usage(format!(
                        "group label '{label}' in file is missing from --order"
                    )));
                }
            }
            names.to_vec()
        }
        None => appearance,
    };

    let groups = ordered
        .iter()
        .map(|name| Matrix::from_rows(&by_label[name]).map_err(anyhow::Error::new))
        .collect::<anyhow::Result<Vec<_>>>()
        .map_err(AppError::Failure)?;
    let dataset = MultiSampleDataset::new(groups).map_err(anyhow::Error::new)?;
    Ok(IngestedDataset {
        dataset,
        group_names: ordered,
        column_names: coord_names,
    })
}

/// Writes a dataset in the single-file layout with a leading group column.
pub fn write_grouped_csv<W: std::io::Write>(
    out: W,
    dataset: &MultiSampleDataset,
    group_names: &[String],
    column_names: &[String],
    group_col: &str,
) -> anyhow::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    let mut header = vec![group_col.to_string()];
    header.extend(column_names.iter().cloned());
    writer.write_record(&header)?;
    for (g, name) in group_names.iter().enumerate() {
        let m = dataset.group(g);
        for i in 0..m.n_rows() {
            let mut record = vec![name.clone()];
            record.extend(m.row(i).iter().map(|v| format!("{v}")));
            writer.write_record(&record)?;
        }
    }
    writer.flush()?;
    Ok(())
}
