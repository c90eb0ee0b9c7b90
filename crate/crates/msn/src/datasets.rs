//! Bit-exact MNIST (IDX) and CIFAR-10 (binary) ingestion.
//!
//! IDX layout: big-endian i32 magic (2051 images / 2049 labels), big-endian
//! i32 dimensions (count, rows, cols for images; count for labels), then raw
//! unsigned bytes. CIFAR-10 binary: 3073-byte records, 1 label byte followed
//! by 1024 red, 1024 green, 1024 blue bytes in row-major 32x32 order.
//!
//! Files starting with the gzip magic `1f 8b` are decompressed transparently.
//! Pixels are scaled by 1/255 into [0,1]; nothing else is done at load time.

use crate::rng::permutation;
use crate::tensor::Tensor;
use flate2::read::GzDecoder;
use std::io::Read;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const IDX_IMAGE_MAGIC: u32 = 2051;
pub const IDX_LABEL_MAGIC: u32 = 2049;
pub const CIFAR_RECORD_BYTES: usize = 3073;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: bad magic {found} (expected {expected})")]
    BadMagic {
        path: PathBuf,
        expected: u32,
        found: u32,
    },
    #[error("image count {images} does not match label count {labels}")]
    DimensionMismatch { images: usize, labels: usize },
    #[error("{path}: truncated, needed {needed} bytes but got {got}")]
    TruncatedFile {
        path: PathBuf,
        needed: usize,
        got: usize,
    },
    #[error("{path}: record {record} has label {label} > 9")]
    BadLabel {
        path: PathBuf,
        record: usize,
        label: u8,
    },
}

/// Images in [0,1] with class labels.
#[derive(Clone, Debug)]
pub struct LabeledImageSet {
    pub name: String,
    /// Shape (count, channels, height, width).
    pub images: Tensor,
    pub labels: Vec<u8>,
    pub num_classes: usize,
}

impl LabeledImageSet {
    pub fn count(&self) -> usize {
        self.labels.len()
    }

    /// Image extent (channels, height, width).
    pub fn image_shape(&self) -> (usize, usize, usize) {
        let s = self.images.shape();
        (s[1], s[2], s[3])
    }

    pub fn image(&self, index: usize) -> &[f64] {
        let per = self.images.len() / self.count().max(1);
        &self.images.data()[index * per..(index + 1) * per]
    }

    /// Copy of the records selected by `indices`, preserving their order.
    pub fn subset(&self, indices: &[usize]) -> LabeledImageSet {
        let (c, h, w) = self.image_shape();
        let per = c * h * w;
        let mut data = Vec::with_capacity(indices.len() * per);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            data.extend_from_slice(self.image(i));
            labels.push(self.labels[i]);
        }
        LabeledImageSet {
            name: self.name.clone(),
            images: Tensor::from_vec(vec![indices.len(), c, h, w], data),
            labels,
            num_classes: self.num_classes,
        }
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, DatasetError> {
    let raw = std::fs::read(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    if raw.len() >= 2 && raw[0] == 0x1f && raw[1] == 0x8b {
        let mut out = Vec::new();
        GzDecoder::new(raw.as_slice())
            .read_to_end(&mut out)
            .map_err(|source| DatasetError::Io {
                path: path.to_path_buf(),
                source,
            })?;
        return Ok(out);
    }
    Ok(raw)
}

fn be_u32(bytes: &[u8], offset: usize, path: &Path) -> Result<u32, DatasetError> {
    let end = offset + 4;
    if bytes.len() < end {
        return Err(DatasetError::TruncatedFile {
            path: path.to_path_buf(),
            needed: end,
            got: bytes.len(),
        });
    }
    Ok(u32::from_be_bytes([
        bytes[offset],
        bytes[offset + 1],
        bytes[offset + 2],
        bytes[offset + 3],
    ]))
}

/// Parse IDX image bytes into (count, rows, cols, pixels).
pub fn parse_idx_images(bytes: &[u8], path: &Path) -> Result<(usize, usize, usize, &[u8]), DatasetError> {
    let magic = be_u32(bytes, 0, path)?;
    if magic != IDX_IMAGE_MAGIC {
        return Err(DatasetError::BadMagic {
            path: path.to_path_buf(),
            expected: IDX_IMAGE_MAGIC,
            found: magic,
        });
    }
    let count = be_u32(bytes, 4, path)? as usize;
    let rows = be_u32(bytes, 8, path)? as usize;
    let cols = be_u32(bytes, 12, path)? as usize;
    let needed = 16 + count * rows * cols;
    if bytes.len() < needed {
        return Err(DatasetError::TruncatedFile {
            path: path.to_path_buf(),
            needed,
            got: bytes.len(),
        });
    }
    Ok((count, rows, cols, &bytes[16..needed]))
}

/// Parse IDX label bytes into (count, labels).
pub fn parse_idx_labels(bytes: &[u8], path: &Path) -> Result<(usize, &[u8]), DatasetError> {
    let magic = be_u32(bytes, 0, path)?;
    if magic != IDX_LABEL_MAGIC {
        return Err(DatasetError::BadMagic {
            path: path.to_path_buf(),
            expected: IDX_LABEL_MAGIC,
            found: magic,
        });
    }
    let count = be_u32(bytes, 4, path)? as usize;
    let needed = 8 + count;
    if bytes.len() < needed {
        return Err(DatasetError::TruncatedFile {
            path: path.to_path_buf(),
            needed,
            got: bytes.len(),
        });
    }
    Ok((count, &bytes[8..needed]))
}

/// Load an MNIST-style IDX image/label pair.
pub fn load_mnist(images_path: &Path, labels_path: &Path) -> Result<LabeledImageSet, DatasetError> {
    let image_bytes = read_file(images_path)?;
    let (count, rows, cols, pixels) = parse_idx_images(&image_bytes, images_path)?;
    let label_bytes = read_file(labels_path)?;
    let (label_count, labels) = parse_idx_labels(&label_bytes, labels_path)?;
    if count != label_count {
        return Err(DatasetError::DimensionMismatch {
            images: count,
            labels: label_count,
        });
    }
    for (record, &label) in labels.iter().enumerate() {
        if label > 9 {
            return Err(DatasetError::BadLabel {
                path: labels_path.to_path_buf(),
                record,
                label,
            });
        }
    }
    let data: Vec<f64> = pixels.iter().map(|&p| p as f64 / 255.0).collect();
    Ok(LabeledImageSet {
        name: "mnist".to_string(),
        images: Tensor::from_vec(vec![count, 1, rows, cols], data),
        labels: labels.to_vec(),
        num_classes: 10,
    })
}

/// Load CIFAR-10 binary batches, concatenated in path order.
pub fn load_cifar10(batch_paths: &[PathBuf]) -> Result<LabeledImageSet, DatasetError> {
    let mut data = Vec::new();
    let mut labels = Vec::new();
    for path in batch_paths {
        let bytes = read_file(path)?;
        if bytes.len() % CIFAR_RECORD_BYTES != 0 {
            return Err(DatasetError::TruncatedFile {
                path: path.clone(),
                needed: bytes.len().div_ceil(CIFAR_RECORD_BYTES) * CIFAR_RECORD_BYTES,
                got: bytes.len(),
            });
        }
        for (record, chunk) in bytes.chunks_exact(CIFAR_RECORD_BYTES).enumerate() {
            let label = chunk[0];
            if label > 9 {
                return Err(DatasetError::BadLabel {
                    path: path.clone(),
                    record,
                    label,
                });
            }
            labels.push(label);
            data.extend(chunk[1..].iter().map(|&p| p as f64 / 255.0));
        }
    }
    Ok(LabeledImageSet {
        name: "cifar10".to_string(),
        images: Tensor::from_vec(vec![labels.len(), 3, 32, 32], data),
        labels,
        num_classes: 10,
    })
}

/// Deterministic permutation of 0..count for shuffling.
pub fn shuffled_indices(count: usize, seed: u64) -> Vec<usize> {
    permutation(count, seed)
}

/// Encode a u8 image stack to IDX bytes (round-trip testing and fixtures).
pub fn encode_idx_images(count: usize, rows: usize, cols: usize, pixels: &[u8]) -> Vec<u8> {
    assert_eq!(pixels.len(), count * rows * cols);
    let mut out = Vec::with_capacity(16 + pixels.len());
    out.extend_from_slice(&IDX_IMAGE_MAGIC.to_be_bytes());
    out.extend_from_slice(&(count as u32).to_be_bytes());
    out.extend_from_slice(&(rows as u32).to_be_bytes());
    out.extend_from_slice(&(cols as u32).to_be_bytes());
    out.extend_from_slice(pixels);
    out
}

pub fn encode_idx_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&IDX_LABEL_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Write;

    fn write_temp(dir: &tempfile::TempDir, name: &str, bytes: &[u8]) -> PathBuf {
        let path = dir.path().join(name);
        std::fs::write(&path, bytes).unwrap();
        path
    }

    #[test]
    fn empty_payload_with_valid_header() {
        let dir = tempfile::tempdir().unwrap();
        let img = write_temp(&dir, "img", &encode_idx_images(0, 28, 28, &[]));
        let lbl = write_temp(&dir, "lbl", &encode_idx_labels(&[]));
        let set = load_mnist(&img, &lbl).unwrap();
        assert_eq!(set.count(), 0);
        assert_eq!(set.images.shape(), &[0, 1, 28, 28]);
    }

    #[test]
    fn label_magic_in_image_slot_is_bad_magic() {
        let dir = tempfile::tempdir().unwrap();
        let mut bytes = encode_idx_labels(&[1, 2, 3]);
        bytes.extend_from_slice(&[0; 16]);
        let img = write_temp(&dir, "img", &bytes);
        let lbl = write_temp(&dir, "lbl", &encode_idx_labels(&[1, 2, 3]));
        match load_mnist(&img, &lbl) {
            Err(DatasetError::BadMagic { expected, found, .. }) => {
                assert_eq!(expected, 2051);
                assert_eq!(found, 2049);
            }
            other => panic!("expected BadMagic, got {other:?}"),
        }
        // and an image magic in the label slot
        let img2 = write_temp(&dir, "img2", &encode_idx_images(1, 2, 2, &[9, 9, 9, 9]));
        let lbl2 = write_temp(&dir, "lbl2", &encode_idx_images(1, 2, 2, &[9, 9, 9, 9]));
        assert!(matches!(
            load_mnist(&img2, &lbl2),
            Err(DatasetError::BadMagic { found: 2051, .. })
        ));
    }

    #[test]
    fn image_label_count_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let img = write_temp(&dir, "img", &encode_idx_images(2, 1, 1, &[10, 20]));
        let lbl = write_temp(&dir, "lbl", &encode_idx_labels(&[1]));
        assert!(matches!(
            load_mnist(&img, &lbl),
            Err(DatasetError::DimensionMismatch { images: 2, labels: 1 })
        ));
    }

    #[test]
    fn truncated_image_payload() {
        let dir = tempfile::tempdir().unwrap();
        let mut bytes = encode_idx_images(2, 2, 2, &[0; 8]);
        bytes.truncate(16 + 5);
        let img = write_temp(&dir, "img", &bytes);
        let lbl = write_temp(&dir, "lbl", &encode_idx_labels(&[0, 1]));
        assert!(matches!(
            load_mnist(&img, &lbl),
            Err(DatasetError::TruncatedFile { needed: 24, got: 21, .. })
        ));
    }

    #[test]
    fn normalization_bounds_and_255_maps_to_one() {
        let dir = tempfile::tempdir().unwrap();
        let img = write_temp(&dir, "img", &encode_idx_images(1, 2, 2, &[0, 255, 128, 7]));
        let lbl = write_temp(&dir, "lbl", &encode_idx_labels(&[3]));
        let set = load_mnist(&img, &lbl).unwrap();
        let v = set.images.data();
        assert_eq!(v[0], 0.0);
        assert_eq!(v[1], 1.0);
        assert!(v.iter().all(|&p| (0.0..=1.0).contains(&p)));
        assert_eq!(set.labels, vec![3]);
    }

    #[test]
    fn gzip_transparent_decompression() {
        let dir = tempfile::tempdir().unwrap();
        let raw_img = encode_idx_images(1, 2, 2, &[1, 2, 3, 4]);
        let mut enc = flate2::write::GzEncoder::new(Vec::new(), flate2::Compression::default());
        enc.write_all(&raw_img).unwrap();
        let img = write_temp(&dir, "img.gz", &enc.finish().unwrap());
        let lbl = write_temp(&dir, "lbl", &encode_idx_labels(&[5]));
        let set = load_mnist(&img, &lbl).unwrap();
        assert_eq!(set.count(), 1);
        assert!((set.images.data()[3] - 4.0 / 255.0).abs() < 1e-15);
    }

    #[test]
    fn cifar_single_record() {
        let dir = tempfile::tempdir().unwrap();
        let mut record = vec![7u8];
        record.extend(std::iter::repeat_n(9u8, 3072));
        let path = write_temp(&dir, "batch.bin", &record);
        let set = load_cifar10(&[path]).unwrap();
        assert_eq!(set.count(), 1);
        assert_eq!(set.labels, vec![7]);
        assert_eq!(set.images.shape(), &[1, 3, 32, 32]);
    }

    #[test]
    fn cifar_truncated_and_bad_label() {
        let dir = tempfile::tempdir().unwrap();
        let short = write_temp(&dir, "short.bin", &vec![0u8; 3072]);
        assert!(matches!(
            load_cifar10(&[short]),
            Err(DatasetError::TruncatedFile { got: 3072, .. })
        ));
        let mut record = vec![10u8];
        record.extend(std::iter::repeat_n(0u8, 3072));
        let bad = write_temp(&dir, "bad.bin", &record);
        assert!(matches!(
            load_cifar10(&[bad]),
            Err(DatasetError::BadLabel { label: 10, record: 0, .. })
        ));
    }

    #[test]
    fn cifar_concatenates_in_path_order() {
        let dir = tempfile::tempdir().unwrap();
        let mut rec = |label: u8| {
            let mut r = vec![label];
            r.extend(std::iter::repeat_n(label, 3072));
            r
        };
        let a = write_temp(&dir, "a.bin", &rec(1));
        let b = write_temp(&dir, "b.bin", &rec(2));
        let set = load_cifar10(&[a, b]).unwrap();
        assert_eq!(set.labels, vec![1, 2]);
    }

    #[test]
    fn shuffled_indices_contract() {
        assert!(shuffled_indices(0, 9).is_empty());
        assert_eq!(shuffled_indices(5, 42), shuffled_indices(5, 42));
        let p = shuffled_indices(10_000, 3);
        let mut sorted = p.clone();
        sorted.sort_unstable();
        assert!(sorted.into_iter().eq(0..10_000));
    }

    proptest! {
        #[test]
        fn idx_round_trip_preserves_pixel_codes(
            pixels in proptest::collection::vec(0u8..=255, 0..200),
            labels_len in 0usize..4,
        ) {
            // shape the pixel pool into whole 2x2 images
            let count = pixels.len() / 4;
            let pixels = &pixels[..count * 4];
            let labels: Vec<u8> = (0..count).map(|i| (i % 10) as u8).collect();
            let _ = labels_len;
            let dir = tempfile::tempdir().unwrap();
            let img = dir.path().join("img");
            let lbl = dir.path().join("lbl");
            std::fs::write(&img, encode_idx_images(count, 2, 2, pixels)).unwrap();
            std::fs::write(&lbl, encode_idx_labels(&labels)).unwrap();
            let set = load_mnist(&img, &lbl).unwrap();
            // integer domain round trip: recover codes exactly
            let codes: Vec<u8> = set.images.iter().map(|&v| (v * 255.0).round() as u8).collect();
            prop_assert_eq!(codes.as_slice(), pixels);
            prop_assert_eq!(set.labels, labels);
        }
    }
}
