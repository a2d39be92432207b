//! On-disk cache of embedding searches, keyed by a hash of Q.
//!
//! Entries are self-describing JSON carrying the matrix they answer for and
//! a checksum over their payload. Anything that fails to parse, names a
//! different matrix, fails the checksum or fails revalidation is deleted and
//! recomputed. Cache IO problems are reported as warnings and never change
//! the answer.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use brieskorn::exact::IntegerMatrix;
use brieskorn::json::{matrix_from_str, matrix_to_value};
use brieskorn::lattice::{
    canonical_form, enumerate_embeddings_with, find_embedding_with, DiagonalEmbedding, Enumeration, EnumerationStatus,
    SearchOptions,
};
use brieskorn::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    version: u32,
    kind: String,
    q: Value,
    result: Value,
    checksum: String,
}

fn digest(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.as_bytes());
        h.update([0u8]);
    }
    hex::encode(h.finalize())
}

fn checksum(kind: &str, q: &Value, result: &Value) -> String {
    digest(&[kind, &q.to_string(), &result.to_string()])
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Cache { dir }
    }

    pub fn disabled() -> Self {
        Cache { dir: None }
    }

    fn path(&self, kind: &str, q: &Value) -> Option<PathBuf> {
        let key = digest(&[kind, &q.to_string()]);
        self.dir.as_ref().map(|d| d.join(format!("{key}.json")))
    }

    /// Returns the cached payload for `(kind, q)`, discarding broken entries.
    fn load(&self, kind: &str, q: &Value) -> Option<(PathBuf, Value)> {
        let path = self.path(kind, q)?;
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return None,
            Err(e) => {
                warn(&format!("cannot read cache entry {}: {e}", path.display()));
                return None;
            }
        };
        let entry: Entry = match serde_json::from_str(&text) {
            Ok(e) => e,
            Err(e) => {
                discard(&path, &format!("unparsable ({e})"));
                return None;
            }
        };
        if entry.version != VERSION || entry.kind != kind || &entry.q != q {
            discard(&path, "does not match the query");
            return None;
        }
        if entry.checksum != checksum(kind, q, &entry.result) {
            discard(&path, "checksum mismatch");
            return None;
        }
        Some((path, entry.result))
    }

    fn store(&self, kind: &str, q: &Value, result: Value) {
        let (Some(dir), Some(path)) = (self.dir.as_ref(), self.path(kind, q)) else {
            return;
        };
        let entry = Entry {
            version: VERSION,
            kind: kind.to_string(),
            q: q.clone(),
            checksum: checksum(kind, q, &result),
            result,
        };
        let write = || -> std::io::Result<()> {
            fs::create_dir_all(dir)?;
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            serde_json::to_writer(&mut tmp, &entry)?;
            tmp.write_all(b"\n")?;
            tmp.as_file().sync_all()?;
            tmp.persist(&path).map_err(|e| e.error)?;
            Ok(())
        };
        if let Err(e) = write() {
            warn(&format!("cannot write cache entry {}: {e}", path.display()));
        }
    }

    /// `find_embedding_with` through the cache. Search-limit outcomes are
    /// not cached.
    pub fn find(&self, q: &IntegerMatrix, opts: &SearchOptions) -> Result<Option<DiagonalEmbedding>> {
        let qv = matrix_to_value(q);
        if let Some((path, v)) = self.load("find", &qv) {
            match decode_find(q, &v) {
                Ok(e) => return Ok(e),
                Err(e) => discard(&path, &e.to_string()),
            }
        }
        let found = find_embedding_with(q, opts)?;
        let v = match &found {
            Some(e) => matrix_to_value(e.matrix()),
            None => Value::Null,
        };
        self.store("find", &qv, v);
        Ok(found)
    }

    /// `enumerate_embeddings_with` through the cache. Only exhaustive
    /// enumerations are cached; truncated ones depend on search order.
    pub fn enumerate(&self, q: &IntegerMatrix, limit: usize, opts: &SearchOptions) -> Result<Enumeration> {
        let qv = matrix_to_value(q);
        let kind = format!("enumerate:{limit}:{}", if opts.parallel { "par" } else { "seq" });
        if let Some((path, v)) = self.load(&kind, &qv) {
            match decode_enumeration(q, limit, &v) {
                Ok(e) => return Ok(e),
                Err(e) => discard(&path, &e.to_string()),
            }
        }
        let en = enumerate_embeddings_with(q, limit, opts)?;
        if en.status == EnumerationStatus::Exhaustive {
            let v = json!({
                "embeddings": en.embeddings.iter().map(|e| matrix_to_value(e.matrix())).collect::<Vec<_>>(),
                "nodes": en.nodes,
            });
            self.store(&kind, &qv, v);
        }
        Ok(en)
    }
}

fn decode_matrix(q: &IntegerMatrix, v: &Value) -> Result<DiagonalEmbedding> {
    DiagonalEmbedding::new(q, matrix_from_str(&v.to_string())?)
}

fn decode_find(q: &IntegerMatrix, v: &Value) -> Result<Option<DiagonalEmbedding>> {
    if v.is_null() {
        Ok(None)
    } else {
        decode_matrix(q, v).map(Some)
    }
}

fn decode_enumeration(q: &IntegerMatrix, limit: usize, v: &Value) -> Result<Enumeration> {
    let bad = |m: &str| Error::Parse(format!("cached enumeration: {m}"));
    let list = v.get("embeddings").and_then(Value::as_array).ok_or_else(|| bad("no embeddings"))?;
    let nodes = v.get("nodes").and_then(Value::as_u64).ok_or_else(|| bad("no node count"))?;
    if list.len() > limit {
        return Err(bad("more entries than the limit"));
    }
    let embeddings = list.iter().map(|m| decode_matrix(q, m)).collect::<Result<Vec<_>>>()?;
    for e in &embeddings {
        if &canonical_form(e.matrix()) != e.matrix() {
            return Err(bad("entry not in canonical form"));
        }
    }
    if embeddings.windows(2).any(|w| w[0].matrix().to_rows() >= w[1].matrix().to_rows()) {
        return Err(bad("entries out of order"));
    }
    Ok(Enumeration {
        embeddings,
        status: EnumerationStatus::Exhaustive,
        nodes,
    })
}

fn discard(path: &Path, why: &str) {
    warn(&format!("discarding cache entry {}: {why}", path.display()));
    if let Err(e) = fs::remove_file(path) {
        if e.kind() != std::io::ErrorKind::NotFound {
            warn(&format!("cannot remove {}: {e}", path.display()));
        }
    }
}

fn warn(msg: &str) {
    eprintln!("warning: {msg}");
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q345() -> IntegerMatrix {
        IntegerMatrix::from_rows(&[
            [-1, 1, 1, 1, 0],
            [1, -3, 0, 0, 0],
            [1, 0, -4, 0, 0],
            [1, 0, 0, -3, 1],
            [0, 0, 0, 1, -2],
        ])
    }

    fn entries(dir: &Path) -> Vec<PathBuf> {
        fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect()
    }

    #[test]
    fn hit_equals_miss() {
        let tmp = tempfile::tempdir().unwrap();
        let cache = Cache::new(Some(tmp.path().to_path_buf()));
        let opts = SearchOptions::default();
        let miss = cache.find(&q345(), &opts).unwrap();
        assert_eq!(entries(tmp.path()).len(), 1);
        let hit = cache.find(&q345(), &opts).unwrap();
        assert_eq!(miss, hit);
        let en1 = cache.enumerate(&q345(), 100, &opts).unwrap();
        let en2 = cache.enumerate(&q345(), 100, &opts).unwrap();
        assert_eq!(en1, en2);
        assert_eq!(entries(tmp.path()).len(), 2);
    }

    #[test]
    fn corrupt_entries_are_replaced() {
        let tmp = tempfile::tempdir().unwrap();
        let cache = Cache::new(Some(tmp.path().to_path_buf()));
        let opts = SearchOptions::default();
        let fresh = cache.find(&q345(), &opts).unwrap();
        let path = entries(tmp.path()).pop().unwrap();

        fs::write(&path, "{ not json").unwrap();
        assert_eq!(cache.find(&q345(), &opts).unwrap(), fresh);

        // A forged "no embedding" answer with a stale checksum.
        let mut entry: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        entry["result"] = Value::Null;
        fs::write(&path, entry.to_string()).unwrap();
        assert_eq!(cache.find(&q345(), &opts).unwrap(), fresh);

        // A well-formed entry whose matrix is not an embedding.
        let mut entry: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        entry["result"][0][0] = json!(7);
        entry["checksum"] = json!(checksum("find", &entry["q"], &entry["result"]));
        fs::write(&path, entry.to_string()).unwrap();
        assert_eq!(cache.find(&q345(), &opts).unwrap(), fresh);
    }

    #[test]
    fn unwritable_dir_is_not_fatal() {
        let tmp = tempfile::tempdir().unwrap();
        let file = tmp.path().join("plain-file");
        fs::write(&file, "x").unwrap();
        let cache = Cache::new(Some(file.join("sub")));
        assert!(cache.find(&q345(), &SearchOptions::default()).unwrap().is_some());
    }

    #[test]
    fn disabled_cache_writes_nothing() {
        let cache = Cache::disabled();
        assert!(cache.dir.is_none());
        assert!(cache.find(&q345(), &SearchOptions::default()).unwrap().is_some());
    }
}
