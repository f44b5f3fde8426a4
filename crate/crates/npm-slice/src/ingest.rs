//! Package ingestion: locate npm packages (directories or `.tgz`/`.tar.gz`
//! archives), unpack them safely, and produce per-package JavaScript file
//! sets for the analysis pipeline.
//!
//! Archives are extracted in memory — nothing is written back to disk and the
//! origin archive is never modified.  Entries that would escape the
//! extraction root (`..`, absolute paths) reject the whole package.  Files
//! are decoded as UTF-8 with lossy replacement (minified malware often ships
//! odd encodings and must not abort the run) and a leading byte-order mark is
//! dropped.  Oversized files are skipped with a per-file warning instead of
//! being parsed.

use std::collections::BTreeSet;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Recognized JavaScript extensions.
pub const JS_EXTENSIONS: [&str; 3] = ["js", "mjs", "cjs"];

/// Per-file size cap (bytes); larger files are skipped with a warning.
pub const DEFAULT_MAX_FILE_BYTES: u64 = 20 * 1024 * 1024;

/// Truth label a corpus manifest assigns to a package.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Benign,
    Malware,
    Unlabeled,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Benign => "benign",
            Label::Malware => "malware",
            Label::Unlabeled => "unlabeled",
        }
    }
}

/// Outcome of opening one package.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PackageStatus {
    /// At least one JavaScript file was found.
    Ok,
    /// The archive was unreadable or truncated.
    CorruptArchive,
    /// Files exist, but none with a JavaScript extension.
    NoJavascript,
    /// The package contains no files at all.
    Empty,
}

impl PackageStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            PackageStatus::Ok => "ok",
            PackageStatus::CorruptArchive => "corrupt_archive",
            PackageStatus::NoJavascript => "no_javascript",
            PackageStatus::Empty => "empty",
        }
    }
}

/// One package to analyze: manifest identity plus its on-disk location.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackageRef {
    /// Directory or archive stem; unique within a corpus run.
    pub id: String,
    pub origin_path: PathBuf,
    pub declared_label: Label,
}

impl PackageRef {
    /// Identity derived from a filesystem path: the final component with any
    /// `.tgz`/`.tar.gz` suffix stripped, label `unlabeled`.
    pub fn from_path(path: impl Into<PathBuf>) -> PackageRef {
        let origin_path: PathBuf = path.into();
        let id = package_id_for(&origin_path);
        PackageRef { id, origin_path, declared_label: Label::Unlabeled }
    }
}

fn package_id_for(path: &Path) -> String {
    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    for suffix in [".tar.gz", ".tgz", ".tar"] {
        if let Some(stem) = name.strip_suffix(suffix) {
            return stem.to_string();
        }
    }
    name
}

/// One decoded source file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SourceFile {
    /// Path relative to the package root, `/`-separated.
    pub rel_path: String,
    pub text: String,
    /// Number of newline-delimited lines in `text`.
    pub line_count: usize,
}

/// The decoded JavaScript contents of one package.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SourceFileSet {
    pub package: PackageRef,
    /// JavaScript files only, sorted by relative path.
    pub files: Vec<SourceFile>,
    pub status: PackageStatus,
    /// `package.json` text, kept as metadata but never sliced.
    pub package_json: Option<String>,
    /// Per-file skips and decode notes.
    pub warnings: Vec<String>,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("package path does not exist: {0}")]
    MissingPackage(PathBuf),
    #[error("archive member escapes the extraction root: {0}")]
    PathTraversal(String),
    #[error("duplicate package id in manifest: {0}")]
    DuplicateId(String),
    #[error("manifest row {row} has no path")]
    MissingPath { row: usize },
    #[error("manifest row {row}: unknown label {label:?} (expected benign|malware|unlabeled)")]
    BadLabel { row: usize, label: String },
    #[error("cannot read manifest {path}: {source}")]
    ManifestIo {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed manifest {path}: {detail}")]
    BadManifest { path: PathBuf, detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Open one package at `path` (directory or `.tgz`/`.tar.gz` archive).
///
/// Corrupt archives are a *status*, not an error — the returned set carries
/// `status = corrupt_archive` with no files.  Errors are reserved for a
/// missing path and for archive members that attempt path traversal.
pub fn open_package(path: impl AsRef<Path>) -> Result<SourceFileSet, IngestError> {
    open_package_ref(PackageRef::from_path(path.as_ref()))
}

/// [`open_package`] with a manifest-supplied identity and label.
pub fn open_package_ref(pkg: PackageRef) -> Result<SourceFileSet, IngestError> {
    open_package_with(pkg, DEFAULT_MAX_FILE_BYTES)
}

/// [`open_package_ref`] with an explicit per-file size cap.
pub fn open_package_with(pkg: PackageRef, max_file_bytes: u64) -> Result<SourceFileSet, IngestError> {
    let path = pkg.origin_path.clone();
    if !path.exists() {
        return Err(IngestError::MissingPackage(path));
    }
    let mut warnings = Vec::new();
    let raw = if path.is_dir() {
        read_dir_tree(&path, max_file_bytes, &mut warnings)?
    } else {
        match read_archive(&path, max_file_bytes, &mut warnings) {
            Ok(files) => files,
            Err(ArchiveError::Traversal(entry)) => return Err(IngestError::PathTraversal(entry)),
            Err(ArchiveError::Corrupt(detail)) => {
                warnings.push(format!("corrupt archive: {detail}"));
                return Ok(SourceFileSet {
                    package: pkg,
                    files: Vec::new(),
                    status: PackageStatus::CorruptArchive,
                    package_json: None,
                    warnings,
                });
            }
        }
    };

    let mut package_json = None;
    let mut files = Vec::new();
    let mut any_file = false;
    for (rel, bytes) in raw {
        any_file = true;
        if rel == "package.json" {
            package_json = Some(decode(&bytes));
            continue;
        }
        if is_javascript(&rel) {
            if std::str::from_utf8(&bytes).is_err() {
                warnings.push(format!("replaced invalid UTF-8 in {rel}"));
            }
            let text = decode(&bytes);
            let line_count = text.lines().count();
            files.push(SourceFile { rel_path: rel, text, line_count });
        }
    }
    files.sort_by(|a, b| a.rel_path.cmp(&b.rel_path));

    let status = if files.is_empty() {
        if any_file {
            PackageStatus::NoJavascript
        } else {
            PackageStatus::Empty
        }
    } else {
        PackageStatus::Ok
    };
    Ok(SourceFileSet { package: pkg, files, status, package_json, warnings })
}

fn is_javascript(rel: &str) -> bool {
    rel.rsplit('.').next().map(|ext| JS_EXTENSIONS.contains(&ext)).unwrap_or(false)
        && rel.contains('.')
}

fn decode(bytes: &[u8]) -> String {
    let text = String::from_utf8_lossy(bytes);
    let text = text.strip_prefix('\u{FEFF}').unwrap_or(&text);
    text.to_string()
}

fn read_dir_tree(
    root: &Path,
    max_file_bytes: u64,
    warnings: &mut Vec<String>,
) -> Result<Vec<(String, Vec<u8>)>, IngestError> {
    let mut out = Vec::new();
    for entry in walkdir::WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| {
            IngestError::Io(std::io::Error::new(std::io::ErrorKind::Other, e.to_string()))
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry
            .path()
            .strip_prefix(root)
            .expect("walkdir yields paths under its root")
            .components()
            .map(|c| c.as_os_str().to_string_lossy().into_owned())
            .collect::<Vec<_>>()
            .join("/");
        let size = entry.metadata().map(|m| m.len()).unwrap_or(0);
        if size > max_file_bytes {
            warnings.push(format!("skipped oversized file {rel} ({size} bytes)"));
            continue;
        }
        let bytes = fs::read(entry.path())?;
        out.push((rel, bytes));
    }
    Ok(out)
}

enum ArchiveError {
    Corrupt(String),
    Traversal(String),
}

fn read_archive(
    path: &Path,
    max_file_bytes: u64,
    warnings: &mut Vec<String>,
) -> Result<Vec<(String, Vec<u8>)>, ArchiveError> {
    let file = fs::File::open(path).map_err(|e| ArchiveError::Corrupt(e.to_string()))?;
    let gz = flate2::read::GzDecoder::new(file);
    let mut archive = tar::Archive::new(gz);
    let mut out = Vec::new();
    let entries = archive.entries().map_err(|e| ArchiveError::Corrupt(e.to_string()))?;
    let mut saw_entry = false;
    for entry in entries {
        let mut entry = entry.map_err(|e| ArchiveError::Corrupt(e.to_string()))?;
        saw_entry = true;
        if !entry.header().entry_type().is_file() {
            continue;
        }
        let raw_path = entry
            .path()
            .map(|p| p.to_string_lossy().into_owned())
            .map_err(|e| ArchiveError::Corrupt(e.to_string()))?;
        if raw_path == "pax_global_header" {
            continue;
        }
        if raw_path.starts_with('/') {
            return Err(ArchiveError::Traversal(raw_path.clone()));
        }
        let mut clean = Vec::new();
        for comp in raw_path.split(['/', '\\']) {
            match comp {
                "" | "." => {}
                ".." => return Err(ArchiveError::Traversal(raw_path.clone())),
                c => clean.push(c),
            }
        }
        if clean.is_empty() {
            continue;
        }
        // npm tarballs nest everything under `package/`.
        if clean.len() > 1 && clean[0] == "package" {
            clean.remove(0);
        }
        let rel = clean.join("/");
        let size = entry.header().size().unwrap_or(0);
        if size > max_file_bytes {
            warnings.push(format!("skipped oversized file {rel} ({size} bytes)"));
            continue;
        }
        let mut bytes = Vec::with_capacity(size as usize);
        entry
            .read_to_end(&mut bytes)
            .map_err(|e| ArchiveError::Corrupt(e.to_string()))?;
        out.push((rel, bytes));
    }
    if !saw_entry {
        // Zero entries from a gzip stream usually means a truncated or empty
        // archive rather than a legitimately empty package.
        let meta = fs::metadata(path).map_err(|e| ArchiveError::Corrupt(e.to_string()))?;
        if meta.len() == 0 {
            return Err(ArchiveError::Corrupt("zero-byte archive".to_string()));
        }
    }
    Ok(out)
}

/// Load a corpus manifest: CSV (`path,label`) or JSONL
/// (`{"path": …, "label": …}`), selected by file extension
/// (`.jsonl`/`.ndjson` → JSONL, anything else → CSV).  Row order is
/// preserved; duplicate package ids are rejected.
pub fn load_corpus(manifest: impl AsRef<Path>) -> Result<Vec<PackageRef>, IngestError> {
    let path = manifest.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| IngestError::ManifestIo { path: path.to_path_buf(), source: e })?;
    let ext = path.extension().map(|e| e.to_string_lossy().to_lowercase()).unwrap_or_default();
    let rows = if ext == "jsonl" || ext == "ndjson" {
        parse_jsonl_manifest(path, &text)?
    } else {
        parse_csv_manifest(path, &text)?
    };

    let base = path.parent().unwrap_or_else(|| Path::new(""));
    let mut refs = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for (row, (raw_path, label, explicit_id)) in rows.into_iter().enumerate() {
        if raw_path.is_empty() {
            return Err(IngestError::MissingPath { row: row + 1 });
        }
        let origin_path = {
            let p = PathBuf::from(&raw_path);
            if p.is_absolute() {
                p
            } else {
                base.join(p)
            }
        };
        let id = explicit_id.unwrap_or_else(|| package_id_for(&origin_path));
        if !seen.insert(id.clone()) {
            return Err(IngestError::DuplicateId(id));
        }
        refs.push(PackageRef { id, origin_path, declared_label: label });
    }
    Ok(refs)
}

fn parse_label(row: usize, s: &str) -> Result<Label, IngestError> {
    match s.trim() {
        "benign" => Ok(Label::Benign),
        "malware" | "malicious" => Ok(Label::Malware),
        "" | "unlabeled" => Ok(Label::Unlabeled),
        other => Err(IngestError::BadLabel { row, label: other.to_string() }),
    }
}

type ManifestRow = (String, Label, Option<String>);

fn parse_csv_manifest(path: &Path, text: &str) -> Result<Vec<ManifestRow>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| IngestError::BadManifest { path: path.to_path_buf(), detail: e.to_string() })?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let path_col = col("path").unwrap_or(0);
    let label_col = col("label").unwrap_or(1);
    let id_col = col("id");
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| IngestError::BadManifest {
            path: path.to_path_buf(),
            detail: e.to_string(),
        })?;
        let raw_path = record.get(path_col).unwrap_or("").trim().to_string();
        let label = parse_label(i + 1, record.get(label_col).unwrap_or(""))?;
        let id = id_col.and_then(|c| record.get(c)).map(|s| s.trim().to_string()).filter(|s| !s.is_empty());
        rows.push((raw_path, label, id));
    }
    Ok(rows)
}

fn parse_jsonl_manifest(path: &Path, text: &str) -> Result<Vec<ManifestRow>, IngestError> {
    #[derive(Deserialize)]
    struct Row {
        path: Option<String>,
        #[serde(default)]
        label: Option<String>,
        #[serde(default)]
        id: Option<String>,
    }
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Row = serde_json::from_str(line).map_err(|e| IngestError::BadManifest {
            path: path.to_path_buf(),
            detail: format!("line {}: {e}", i + 1),
        })?;
        let raw_path = row.path.unwrap_or_default();
        let label = parse_label(i + 1, row.label.as_deref().unwrap_or(""))?;
        rows.push((raw_path, label, row.id.filter(|s| !s.is_empty())));
    }
    Ok(rows)
}

/// One cell of the ingest tally.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub label: Label,
    pub status: PackageStatus,
    pub count: usize,
}

/// Tally of package outcomes by (label, status); cells partition the input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub rows: Vec<SummaryRow>,
    pub total: usize,
}

pub fn corpus_summary(results: &[SourceFileSet]) -> CorpusSummary {
    let mut cells: std::collections::BTreeMap<(Label, PackageStatus), usize> =
        std::collections::BTreeMap::new();
    for set in results {
        *cells.entry((set.package.declared_label, set.status)).or_insert(0) += 1;
    }
    let rows = cells
        .into_iter()
        .map(|((label, status), count)| SummaryRow { label, status, count })
        .collect();
    CorpusSummary { rows, total: results.len() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_file(dir: &Path, rel: &str, contents: &str) {
        let full = dir.join(rel);
        if let Some(parent) = full.parent() {
            fs::create_dir_all(parent).unwrap();
        }
        fs::write(full, contents).unwrap();
    }

    fn gzip_tar(entries: &[(&str, &str)]) -> Vec<u8> {
        let mut builder = tar::Builder::new(Vec::new());
        for (name, contents) in entries {
            let mut header = tar::Header::new_gnu();
            header.set_size(contents.len() as u64);
            header.set_mode(0o644);
            header.set_cksum();
            builder.append_data(&mut header, name, contents.as_bytes()).unwrap();
        }
        let tar_bytes = builder.into_inner().unwrap();
        gzip(&tar_bytes)
    }

    fn gzip(bytes: &[u8]) -> Vec<u8> {
        let mut enc = flate2::write::GzEncoder::new(Vec::new(), flate2::Compression::default());
        enc.write_all(bytes).unwrap();
        enc.finish().unwrap()
    }

    /// Build a tar entry by hand so tests can use member names (e.g. with
    /// `..`) that the tar writer itself refuses to produce.
    fn gzip_tar_raw(entries: &[(&str, &str)]) -> Vec<u8> {
        let mut tar_bytes = Vec::new();
        for (name, contents) in entries {
            let mut header = [0u8; 512];
            header[..name.len()].copy_from_slice(name.as_bytes());
            header[100..107].copy_from_slice(b"0000644"); // mode
            header[108..115].copy_from_slice(b"0000000"); // uid
            header[116..123].copy_from_slice(b"0000000"); // gid
            let size = format!("{:011o}", contents.len());
            header[124..135].copy_from_slice(size.as_bytes());
            header[136..147].copy_from_slice(b"00000000000"); // mtime
            header[156] = b'0'; // regular file
            header[148..156].copy_from_slice(b"        ");
            let sum: u32 = header.iter().map(|&b| b as u32).sum();
            let cksum = format!("{sum:06o}\0 ");
            header[148..156].copy_from_slice(cksum.as_bytes());
            tar_bytes.extend_from_slice(&header);
            tar_bytes.extend_from_slice(contents.as_bytes());
            let pad = (512 - contents.len() % 512) % 512;
            tar_bytes.extend(std::iter::repeat(0u8).take(pad));
        }
        tar_bytes.extend(std::iter::repeat(0u8).take(1024));
        gzip(&tar_bytes)
    }

    #[test]
    fn directory_package_with_js_is_ok() {
        let dir = tempfile::tempdir().unwrap();
        write_file(dir.path(), "index.js", "var a = 1;\nvar b = 2;\nexec(b);\n");
        let set = open_package(dir.path()).unwrap();
        assert_eq!(set.status, PackageStatus::Ok);
        assert_eq!(set.files.len(), 1);
        assert_eq!(set.files[0].rel_path, "index.js");
        assert_eq!(set.files[0].line_count, 3);
    }

    #[test]
    fn json_only_package() {
        let dir = tempfile::tempdir().unwrap();
        write_file(dir.path(), "package.json", "{\"name\":\"x\"}");
        let set = open_package(dir.path()).unwrap();
        assert_eq!(set.status, PackageStatus::NoJavascript);
        assert!(set.package_json.is_some());
        assert!(set.files.is_empty());
    }

    #[test]
    fn empty_directory_package() {
        let dir = tempfile::tempdir().unwrap();
        let set = open_package(dir.path()).unwrap();
        assert_eq!(set.status, PackageStatus::Empty);
    }

    #[test]
    fn zero_byte_archive_is_corrupt_not_fatal() {
        let dir = tempfile::tempdir().unwrap();
        let tgz = dir.path().join("broken-1.0.0.tgz");
        fs::write(&tgz, b"").unwrap();
        let set = open_package(&tgz).unwrap();
        assert_eq!(set.status, PackageStatus::CorruptArchive);
        assert_eq!(set.package.id, "broken-1.0.0");
    }

    #[test]
    fn garbage_archive_is_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        let tgz = dir.path().join("junk.tgz");
        fs::write(&tgz, b"this is not gzip data at all").unwrap();
        let set = open_package(&tgz).unwrap();
        assert_eq!(set.status, PackageStatus::CorruptArchive);
    }

    #[test]
    fn tgz_extraction_strips_package_prefix_and_pax_header() {
        let dir = tempfile::tempdir().unwrap();
        let bytes = gzip_tar(&[
            ("pax_global_header", "ignored"),
            ("package/package.json", "{}"),
            ("package/lib/main.js", "var x = 1;\n"),
        ]);
        let tgz = dir.path().join("pkg-2.0.0.tgz");
        fs::write(&tgz, bytes).unwrap();
        let set = open_package(&tgz).unwrap();
        assert_eq!(set.status, PackageStatus::Ok);
        assert_eq!(set.files.len(), 1);
        assert_eq!(set.files[0].rel_path, "lib/main.js");
        assert!(set.package_json.is_some());
    }

    #[test]
    fn traversal_entry_rejects_package() {
        let dir = tempfile::tempdir().unwrap();
        let bytes = gzip_tar_raw(&[("package/../../evil.js", "exec('x');\n")]);
        let tgz = dir.path().join("evil.tgz");
        fs::write(&tgz, bytes).unwrap();
        let err = open_package(&tgz).unwrap_err();
        assert!(matches!(err, IngestError::PathTraversal(_)));
    }

    #[test]
    fn oversized_file_skipped_with_warning() {
        let dir = tempfile::tempdir().unwrap();
        write_file(dir.path(), "big.js", "var x = 'aaaaaaaaaaaaaaaaaaaa';\n");
        write_file(dir.path(), "small.js", "var y = 1;\n");
        let pkg = PackageRef::from_path(dir.path());
        let set = open_package_with(pkg, 16).unwrap();
        assert_eq!(set.files.len(), 1);
        assert_eq!(set.files[0].rel_path, "small.js");
        assert_eq!(set.warnings.len(), 1);
        assert!(set.warnings[0].contains("big.js"));
    }

    #[test]
    fn lossy_decode_and_bom_strip() {
        let dir = tempfile::tempdir().unwrap();
        let mut bytes = vec![0xEF, 0xBB, 0xBF]; // UTF-8 BOM
        bytes.extend_from_slice(b"var a = 1;\xFF\n");
        fs::write(dir.path().join("odd.js"), bytes).unwrap();
        let set = open_package(dir.path()).unwrap();
        assert_eq!(set.status, PackageStatus::Ok);
        let text = &set.files[0].text;
        assert!(text.starts_with("var a = 1;"));
        assert!(text.contains('\u{FFFD}'));
    }

    #[test]
    fn load_corpus_csv_preserves_order_and_labels() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = dir.path().join("corpus.csv");
        fs::write(&manifest, "path,label\npkgs/alpha,benign\npkgs/beta.tgz,malware\n").unwrap();
        let refs = load_corpus(&manifest).unwrap();
        assert_eq!(refs.len(), 2);
        assert_eq!(refs[0].id, "alpha");
        assert_eq!(refs[0].declared_label, Label::Benign);
        assert_eq!(refs[1].id, "beta");
        assert_eq!(refs[1].declared_label, Label::Malware);
        assert_eq!(refs[0].origin_path, dir.path().join("pkgs/alpha"));
    }

    #[test]
    fn load_corpus_jsonl() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = dir.path().join("corpus.jsonl");
        fs::write(
            &manifest,
            "{\"path\":\"a\",\"label\":\"benign\"}\n{\"path\":\"b\",\"label\":\"malware\",\"id\":\"custom\"}\n",
        )
        .unwrap();
        let refs = load_corpus(&manifest).unwrap();
        assert_eq!(refs.len(), 2);
        assert_eq!(refs[1].id, "custom");
    }

    #[test]
    fn duplicate_id_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = dir.path().join("corpus.csv");
        fs::write(&manifest, "path,label\nx/pkg,benign\ny/pkg,malware\n").unwrap();
        let err = load_corpus(&manifest).unwrap_err();
        assert!(matches!(err, IngestError::DuplicateId(id) if id == "pkg"));
    }

    #[test]
    fn empty_manifest_is_empty_list() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = dir.path().join("corpus.csv");
        fs::write(&manifest, "path,label\n").unwrap();
        assert!(load_corpus(&manifest).unwrap().is_empty());
    }

    #[test]
    fn summary_partitions_input() {
        let dir = tempfile::tempdir().unwrap();
        write_file(dir.path(), "a/index.js", "var x = 1;\n");
        write_file(dir.path(), "b/readme.md", "hello\n");
        let mut a = open_package(dir.path().join("a")).unwrap();
        a.package.declared_label = Label::Benign;
        let mut b = open_package(dir.path().join("b")).unwrap();
        b.package.declared_label = Label::Benign;
        let summary = corpus_summary(&[a, b]);
        assert_eq!(summary.total, 2);
        let sum: usize = summary.rows.iter().map(|r| r.count).sum();
        assert_eq!(sum, 2);
        assert!(summary
            .rows
            .iter()
            .any(|r| r.status == PackageStatus::NoJavascript && r.count == 1));
    }
}
