//! The sensitive-API catalog: which callee names and property paths count as
//! taint sources (data entering the program), sinks (dangerous effects), or
//! duals (either, by direction), organized into feature groups.
//!
//! Matching is regex-based with implicit word-boundary anchoring: a pattern
//! `exec` matches the callee `exec` and the path `child_process.exec` but not
//! `executor`.  `$` counts as an identifier character for boundary purposes.
//! Patterns are matched against a call node's `callee_name` and `prop_path`,
//! and against a member-access node's `prop_path` — property reads like
//! `process.env` are sources without any call involved.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cpg::{Cpg, CpgNode, NodeKind};

/// API role in the taint model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Source,
    Sink,
    Dual,
}

/// Direction a dual-role API is matched under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualDirection {
    AsSource,
    AsSink,
}

/// Behavioral feature group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    InformationGathering,
    FileOperations,
    NetworkCommunication,
    SystemExecution,
    CodeObfuscation,
    EnvironmentCleanup,
    ParallelProcessing,
}

impl Group {
    pub const ALL: [Group; 7] = [
        Group::InformationGathering,
        Group::FileOperations,
        Group::NetworkCommunication,
        Group::SystemExecution,
        Group::CodeObfuscation,
        Group::EnvironmentCleanup,
        Group::ParallelProcessing,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Group::InformationGathering => "information_gathering",
            Group::FileOperations => "file_operations",
            Group::NetworkCommunication => "network_communication",
            Group::SystemExecution => "system_execution",
            Group::CodeObfuscation => "code_obfuscation",
            Group::EnvironmentCleanup => "environment_cleanup",
            Group::ParallelProcessing => "parallel_processing",
        }
    }

    pub fn parse(s: &str) -> Option<Group> {
        Group::ALL.iter().copied().find(|g| g.as_str() == s)
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One catalog row.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ApiPattern {
    /// Regex matched (word-boundary-anchored) against callee names and
    /// property paths.
    pub name_pattern: String,
    pub role: Role,
    pub group: Group,
    /// Present exactly when `role` is `dual`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_direction: Option<DualDirection>,
}

impl ApiPattern {
    pub fn source_capable(&self) -> bool {
        matches!(
            (self.role, self.dual_direction),
            (Role::Source, _) | (Role::Dual, Some(DualDirection::AsSource))
        )
    }

    pub fn sink_capable(&self) -> bool {
        matches!(
            (self.role, self.dual_direction),
            (Role::Sink, _) | (Role::Dual, Some(DualDirection::AsSink))
        )
    }
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("pattern {pattern:?} (row {row}) does not compile: {detail}")]
    BadPattern { row: usize, pattern: String, detail: String },
    #[error("row {row}: unknown role {role:?} (expected source|sink|dual)")]
    BadRole { row: usize, role: String },
    #[error("row {row}: unknown group {group:?}")]
    BadGroup { row: usize, group: String },
    #[error("row {row} ({pattern:?}): dual_direction must be present exactly for role dual")]
    BadDualDirection { row: usize, pattern: String },
    #[error("row {row}: duplicate of an earlier pattern ({pattern:?})")]
    DuplicatePattern { row: usize, pattern: String },
    #[error("catalog has no source-capable or no sink-capable pattern")]
    CatalogEmpty,
    #[error("cannot read catalog file {path}: {detail}")]
    FileError { path: String, detail: String },
    #[error("malformed catalog file {path}: {detail}")]
    BadFormat { path: String, detail: String },
}

/// An immutable, compiled API catalog.
#[derive(Debug, Clone)]
pub struct ApiCatalog {
    pub patterns: Vec<ApiPattern>,
    pub version: String,
    compiled: Vec<Regex>,
}

/// Word-boundary wrapper: the pattern must not be preceded or followed by an
/// identifier character (`$` included).
fn anchored(pattern: &str) -> String {
    format!(r"(?:^|[^\w$])(?:{pattern})(?:[^\w$]|$)")
}

impl ApiCatalog {
    /// Compile and validate a pattern list.
    pub fn from_patterns(
        version: impl Into<String>,
        patterns: Vec<ApiPattern>,
    ) -> Result<ApiCatalog, CatalogError> {
        let mut compiled = Vec::with_capacity(patterns.len());
        let mut seen: BTreeSet<&ApiPattern> = BTreeSet::new();
        for (i, p) in patterns.iter().enumerate() {
            if (p.role == Role::Dual) != p.dual_direction.is_some() {
                return Err(CatalogError::BadDualDirection {
                    row: i + 1,
                    pattern: p.name_pattern.clone(),
                });
            }
            if !seen.insert(p) {
                return Err(CatalogError::DuplicatePattern {
                    row: i + 1,
                    pattern: p.name_pattern.clone(),
                });
            }
            let regex = Regex::new(&anchored(&p.name_pattern)).map_err(|e| {
                CatalogError::BadPattern {
                    row: i + 1,
                    pattern: p.name_pattern.clone(),
                    detail: e.to_string(),
                }
            })?;
            compiled.push(regex);
        }
        let catalog = ApiCatalog { patterns, version: version.into(), compiled };
        if !catalog.patterns.iter().any(|p| p.source_capable())
            || !catalog.patterns.iter().any(|p| p.sink_capable())
        {
            return Err(CatalogError::CatalogEmpty);
        }
        Ok(catalog)
    }

    /// True if `text` contains a word-boundary match of pattern `idx`.
    fn pattern_matches(&self, idx: usize, text: &str) -> bool {
        self.compiled[idx].is_match(text)
    }

    /// Indices of patterns matching any of the node's name candidates.
    fn matching_patterns(&self, node: &CpgNode) -> Vec<usize> {
        let mut candidates: Vec<&str> = Vec::new();
        match node.kind {
            NodeKind::Call => {
                if let Some(name) = &node.callee_name {
                    candidates.push(name);
                }
                if let Some(path) = &node.prop_path {
                    candidates.push(path);
                }
            }
            NodeKind::MemberAccess => {
                if let Some(path) = &node.prop_path {
                    candidates.push(path);
                }
            }
            _ => {}
        }
        if candidates.is_empty() {
            return Vec::new();
        }
        (0..self.patterns.len())
            .filter(|&i| candidates.iter().any(|c| self.pattern_matches(i, c)))
            .collect()
    }

    /// Call/member nodes matching a source-capable pattern of `group`,
    /// sorted by (file, line, column); each node appears once.
    pub fn query_sources<'a>(&self, cpg: &'a Cpg, group: Group) -> Vec<&'a CpgNode> {
        self.query(cpg, group, |p| p.source_capable())
    }

    /// Call/member nodes matching a sink-capable pattern of `group`.
    pub fn query_sinks<'a>(&self, cpg: &'a Cpg, group: Group) -> Vec<&'a CpgNode> {
        self.query(cpg, group, |p| p.sink_capable())
    }

    fn query<'a>(
        &self,
        cpg: &'a Cpg,
        group: Group,
        capable: impl Fn(&ApiPattern) -> bool,
    ) -> Vec<&'a CpgNode> {
        let mut out: Vec<&CpgNode> = Vec::new();
        for node in &cpg.nodes {
            if !matches!(node.kind, NodeKind::Call | NodeKind::MemberAccess) {
                continue;
            }
            let hit = self
                .matching_patterns(node)
                .into_iter()
                .any(|i| self.patterns[i].group == group && capable(&self.patterns[i]));
            if hit {
                out.push(node);
            }
        }
        out.sort_by(|a, b| {
            (a.file.as_str(), a.line, a.column, a.id).cmp(&(b.file.as_str(), b.line, b.column, b.id))
        });
        out
    }

    /// True if raw source text contains a match of any pattern (used for
    /// sensitive-feature lines and the offline stub scorer).
    pub fn text_has_any(&self, text: &str) -> bool {
        (0..self.patterns.len()).any(|i| self.pattern_matches(i, text))
    }

    /// True if `text` matches some pattern satisfying `pred`.
    pub fn text_has(&self, text: &str, pred: impl Fn(&ApiPattern) -> bool) -> bool {
        (0..self.patterns.len())
            .any(|i| pred(&self.patterns[i]) && self.pattern_matches(i, text))
    }

    /// Serialize as a TOML document loadable by [`load_catalog`] in
    /// `replace` mode.
    pub fn to_toml(&self) -> String {
        let mut out = String::new();
        out.push_str("# Sensitive-API catalog dump.\n");
        out.push_str("mode = \"replace\"\n");
        out.push_str(&format!("version = {:?}\n", self.version));
        for p in &self.patterns {
            out.push_str("\n[[patterns]]\n");
            out.push_str(&format!("pattern = {:?}\n", p.name_pattern));
            let role = match p.role {
                Role::Source => "source",
                Role::Sink => "sink",
                Role::Dual => "dual",
            };
            out.push_str(&format!("role = {role:?}\n"));
            out.push_str(&format!("group = {:?}\n", p.group.as_str()));
            if let Some(d) = p.dual_direction {
                let d = match d {
                    DualDirection::AsSource => "as_source",
                    DualDirection::AsSink => "as_sink",
                };
                out.push_str(&format!("dual_direction = {d:?}\n"));
            }
        }
        out
    }
}

/// Rows as they appear in a catalog file, before validation.
#[derive(Debug, Deserialize)]
struct RawPattern {
    pattern: String,
    role: String,
    group: String,
    #[serde(default)]
    dual_direction: Option<String>,
}

#[derive(Debug, Deserialize)]
struct RawCatalog {
    #[serde(default)]
    mode: Option<String>,
    #[serde(default)]
    version: Option<String>,
    #[serde(default)]
    patterns: Vec<RawPattern>,
}

/// Load a TOML or JSON catalog file.  A `mode` field selects whether the
/// rows `"replace"` the builtin catalog or `"extend"` it (the default).
pub fn load_catalog(path: impl AsRef<Path>) -> Result<ApiCatalog, CatalogError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| CatalogError::FileError {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    let ext = path.extension().map(|e| e.to_string_lossy().to_lowercase()).unwrap_or_default();
    let raw: RawCatalog = if ext == "json" {
        serde_json::from_str(&text).map_err(|e| CatalogError::BadFormat {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?
    } else {
        toml::from_str(&text).map_err(|e| CatalogError::BadFormat {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?
    };

    let mut rows = Vec::new();
    for (i, r) in raw.patterns.iter().enumerate() {
        let row = i + 1;
        let role = match r.role.as_str() {
            "source" => Role::Source,
            "sink" => Role::Sink,
            "dual" => Role::Dual,
            other => return Err(CatalogError::BadRole { row, role: other.to_string() }),
        };
        let group = Group::parse(&r.group)
            .ok_or_else(|| CatalogError::BadGroup { row, group: r.group.clone() })?;
        let dual_direction = match r.dual_direction.as_deref() {
            None => None,
            Some("as_source") => Some(DualDirection::AsSource),
            Some("as_sink") => Some(DualDirection::AsSink),
            Some(_) => {
                return Err(CatalogError::BadDualDirection { row, pattern: r.pattern.clone() })
            }
        };
        rows.push(ApiPattern { name_pattern: r.pattern.clone(), role, group, dual_direction });
    }

    match raw.mode.as_deref().unwrap_or("extend") {
        "replace" => {
            let version = raw.version.unwrap_or_else(|| "custom".to_string());
            ApiCatalog::from_patterns(version, rows)
        }
        _ => {
            let mut patterns = builtin_catalog().patterns;
            let existing: BTreeSet<ApiPattern> = patterns.iter().cloned().collect();
            for r in rows {
                if !existing.contains(&r) {
                    patterns.push(r);
                }
            }
            let version = raw.version.unwrap_or_else(|| "builtin+custom".to_string());
            ApiCatalog::from_patterns(version, patterns)
        }
    }
}

fn rows(
    out: &mut Vec<ApiPattern>,
    names: &[&str],
    role: Role,
    group: Group,
    dual_direction: Option<DualDirection>,
) {
    for n in names {
        out.push(ApiPattern {
            name_pattern: (*n).to_string(),
            role,
            group,
            dual_direction,
        });
    }
}

/// The full builtin taxonomy: sources, sinks, and duals with their feature
/// groups, including dotted-path forms (`child_process\.exec`,
/// `process\.env`) alongside bare method names.
pub fn builtin_catalog() -> ApiCatalog {
    let mut p = Vec::new();

    // Sources — file operations read side (dual: these APIs also write).
    rows(
        &mut p,
        &[
            "readFile", "readFileSync", "read", "readSync", "readv", "createReadStream", "open",
            "openSync", "opendir", "readdir", "readlink", "realpath", "access", "exists", "stat",
            "fstat", "lstat", "Dir", "Dirent", "ReadStream", "FileReadStream",
            r"fs\.readFileSync",
        ],
        Role::Dual,
        Group::FileOperations,
        Some(DualDirection::AsSource),
    );

    // Sources — information gathering.
    rows(
        &mut p,
        &[
            "userInfo", "networkInterfaces", "cpus", "homedir", "platform", "hostname", "arch",
            "release", "version", "tmpdir", "totalmem", "uptime", "getuid", "getgid", "getgroups",
            "cpuUsage", "memoryUsage", r"process\.env", r"process\.argv", r"process\.version",
            r"process\.pid", r"process\.platform", r"process\.arch", "lookup", "resolve",
            "getServers", "Resolver", r"os\.userInfo",
        ],
        Role::Source,
        Group::InformationGathering,
        None,
    );

    // Sources — network receive side.
    rows(
        &mut p,
        &[
            "createServer", "createSecureServer", "createConnection", "connect", "createSocket",
            "get", "request", "fetch", "Server", "IncomingMessage", "ServerResponse", "Socket",
            "Stream", "TLSSocket", "WebSocket", "_connectionListener", "send", r"socket\.on",
        ],
        Role::Dual,
        Group::NetworkCommunication,
        Some(DualDirection::AsSource),
    );

    // Sinks — file modification.
    rows(
        &mut p,
        &[
            "writeFile", "writeFileSync", "appendFile", "createWriteStream", "write", "writeSync",
            "save", "copyFile", "cp", "rename", "chmod", "chown", "utimes", "mkdir", "mkdtemp",
            "symlink", "link", "fsync", "close", "WriteStream", r"fs\.writeFileSync",
        ],
        Role::Dual,
        Group::FileOperations,
        Some(DualDirection::AsSink),
    );

    // Sinks — command / code execution.
    rows(
        &mut p,
        &[
            "exec", "execSync", "spawn", "spawnSync", "fork", "execFile", "_forkChild",
            "ChildProcess", "dlopen", "binding", "eval", "Function", "setTimeout", "setInterval",
            "Invoke-Expression", "Start-Process", "ShellExecute", "run", r"child_process\.exec",
        ],
        Role::Sink,
        Group::SystemExecution,
        None,
    );

    // Sinks — network send side.
    rows(
        &mut p,
        &[
            "request", "get", "post", "put", "delete", "patch", "fetch", "curl", "connect",
            "createConnection", "send", "emit", "ClientRequest", "Agent", "Socket", "query",
            "execute", "insert", "save", r"http\.post",
        ],
        Role::Dual,
        Group::NetworkCommunication,
        Some(DualDirection::AsSink),
    );

    // Sinks — encoding, compression, crypto (obfuscation toolkit).
    rows(
        &mut p,
        &[
            "createCipheriv", "createCipher", "publicEncrypt", "sign", "createHmac", "createHash",
            "pbkdf2", "scrypt", "deflate", "gzip", "brotliCompress", "btoa", "atob", "stringify",
            "escape", r"Buffer\.from", r"JSON\.stringify",
        ],
        Role::Sink,
        Group::CodeObfuscation,
        None,
    );

    // Sinks — environment cleanup / anti-forensics.
    rows(
        &mut p,
        &[
            "unlink", "rm", "rmdir", "truncate", "exit", "kill", "abort", "umask", "setuid",
            "setgid", "chdir", "_debugProcess", "unwatchFile", "nextTick", r"fs\.unlink",
            r"process\.kill",
        ],
        Role::Sink,
        Group::EnvironmentCleanup,
        None,
    );

    // Sinks — parallel processing.
    rows(&mut p, &[r"cluster\.fork"], Role::Sink, Group::ParallelProcessing, None);

    ApiCatalog::from_patterns("builtin-1", p).expect("builtin catalog is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpg::{assemble_cpg, build_cfg, build_dfg, parse_file};
    use crate::ingest::PackageRef;

    fn cpg_of(src: &str) -> Cpg {
        let mut fg = parse_file("index.js", src);
        build_cfg(&mut fg);
        build_dfg(&mut fg);
        assemble_cpg(PackageRef::from_path("fixture"), vec![fg])
    }

    #[test]
    fn shipped_dump_matches_builtin() {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/builtin_catalog.toml");
        let disk = std::fs::read_to_string(path).expect("data/builtin_catalog.toml present");
        assert_eq!(disk, builtin_catalog().to_toml(), "regenerate the dump after edits");
        let loaded = load_catalog(path).unwrap();
        assert_eq!(loaded.to_toml(), builtin_catalog().to_toml());
    }

    #[test]
    fn exec_is_a_system_execution_sink() {
        let c = builtin_catalog();
        let hit = c
            .patterns
            .iter()
            .find(|p| p.name_pattern == "exec")
            .expect("exec pattern present");
        assert_eq!(hit.role, Role::Sink);
        assert_eq!(hit.group, Group::SystemExecution);
    }

    #[test]
    fn user_info_is_an_information_source() {
        let c = builtin_catalog();
        let hit = c.patterns.iter().find(|p| p.name_pattern == "userInfo").unwrap();
        assert_eq!(hit.role, Role::Source);
        assert_eq!(hit.group, Group::InformationGathering);
    }

    #[test]
    fn console_log_matches_nothing() {
        let c = builtin_catalog();
        let cpg = cpg_of("console.log('hello');\n");
        for g in Group::ALL {
            assert!(c.query_sources(&cpg, g).is_empty());
            assert!(c.query_sinks(&cpg, g).is_empty());
        }
    }

    #[test]
    fn word_boundaries_respected() {
        let c = builtin_catalog();
        // `executor` contains `exec` but is not a word-boundary match.
        let cpg = cpg_of("executor(1);\n");
        assert!(c.query_sinks(&cpg, Group::SystemExecution).is_empty());
        // `$` counts as an identifier character.
        let cpg = cpg_of("exec$(1);\n");
        assert!(c.query_sinks(&cpg, Group::SystemExecution).is_empty());
        // Dotted context still matches the bare name.
        let cpg = cpg_of("cp.exec('x');\n");
        assert_eq!(c.query_sinks(&cpg, Group::SystemExecution).len(), 1);
    }

    #[test]
    fn process_env_matches_as_member_access() {
        let c = builtin_catalog();
        let cpg = cpg_of("const e = process.env;\nexec(e.PATH);\n");
        let sources = c.query_sources(&cpg, Group::InformationGathering);
        assert_eq!(sources.len(), 1);
        assert_eq!(sources[0].prop_path.as_deref(), Some("process.env"));
        let sinks = c.query_sinks(&cpg, Group::SystemExecution);
        assert_eq!(sinks.len(), 1);
        assert_eq!(sinks[0].callee_name.as_deref(), Some("exec"));
    }

    #[test]
    fn query_results_sorted_and_deduped() {
        let c = builtin_catalog();
        // `child_process.exec` matches both `exec` and `child_process\.exec`
        // patterns; the node must appear once.
        let cpg = cpg_of("child_process.exec('a');\nexec('b');\n");
        let sinks = c.query_sinks(&cpg, Group::SystemExecution);
        assert_eq!(sinks.len(), 2);
        assert!(sinks[0].line < sinks[1].line);
    }

    #[test]
    fn dual_direction_splits_queries() {
        let c = builtin_catalog();
        let cpg = cpg_of("fs.readFileSync('x');\nfs.writeFileSync('y', d);\n");
        let sources = c.query_sources(&cpg, Group::FileOperations);
        assert_eq!(sources.len(), 1);
        assert_eq!(sources[0].callee_name.as_deref(), Some("readFileSync"));
        let sinks = c.query_sinks(&cpg, Group::FileOperations);
        assert_eq!(sinks.len(), 1);
        assert_eq!(sinks[0].callee_name.as_deref(), Some("writeFileSync"));
    }

    #[test]
    fn string_subscript_call_target_matches() {
        let c = builtin_catalog();
        let cpg = cpg_of("child_process['exec']('payload');\n");
        let sinks = c.query_sinks(&cpg, Group::SystemExecution);
        assert_eq!(sinks.len(), 1);
    }

    #[test]
    fn builtin_round_trips_through_toml() {
        let c = builtin_catalog();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("catalog.toml");
        std::fs::write(&path, c.to_toml()).unwrap();
        let loaded = load_catalog(&path).unwrap();
        assert_eq!(loaded.patterns, c.patterns);
    }

    #[test]
    fn extend_mode_adds_patterns() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("extra.toml");
        std::fs::write(
            &path,
            "mode = \"extend\"\n[[patterns]]\npattern = \"rimraf\"\nrole = \"sink\"\ngroup = \"file_operations\"\n",
        )
        .unwrap();
        let loaded = load_catalog(&path).unwrap();
        let builtin = builtin_catalog();
        assert_eq!(loaded.patterns.len(), builtin.patterns.len() + 1);
        assert!(loaded.patterns.iter().any(|p| p.name_pattern == "rimraf"));
    }

    #[test]
    fn bad_role_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.toml");
        std::fs::write(
            &path,
            "[[patterns]]\npattern = \"x\"\nrole = \"snik\"\ngroup = \"file_operations\"\n",
        )
        .unwrap();
        assert!(matches!(load_catalog(&path), Err(CatalogError::BadRole { .. })));
    }

    #[test]
    fn bad_pattern_names_row() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.toml");
        std::fs::write(
            &path,
            "mode = \"replace\"\n[[patterns]]\npattern = \"(unclosed\"\nrole = \"sink\"\ngroup = \"system_execution\"\n",
        )
        .unwrap();
        match load_catalog(&path) {
            Err(CatalogError::BadPattern { row, .. }) => assert_eq!(row, 1),
            other => panic!("expected BadPattern, got {other:?}"),
        }
    }

    #[test]
    fn replace_mode_with_no_rows_is_empty_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.toml");
        std::fs::write(&path, "mode = \"replace\"\n").unwrap();
        assert!(matches!(load_catalog(&path), Err(CatalogError::CatalogEmpty)));
    }

    #[test]
    fn json_catalog_accepted() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cat.json");
        std::fs::write(
            &path,
            r#"{"mode":"extend","patterns":[{"pattern":"leftpad","role":"source","group":"information_gathering"}]}"#,
        )
        .unwrap();
        let loaded = load_catalog(&path).unwrap();
        assert!(loaded.patterns.iter().any(|p| p.name_pattern == "leftpad"));
    }

    #[test]
    fn text_matching_for_feature_lines() {
        let c = builtin_catalog();
        assert!(c.text_has_any("  const h = os.hostname();"));
        assert!(!c.text_has_any("let total = a + b;"));
        assert!(c.text_has("exec(cmd)", |p| p.sink_capable() && p.group == Group::SystemExecution));
        assert!(!c.text_has("exec(cmd)", |p| p.source_capable()));
    }
}
