#!/usr/bin/env python3
"""Regenerates the NIfTI golden files with nibabel as the reference writer.

Expected voxel values and header fields are read back through nibabel and
stored in golden.json, so the C++ reader is checked against an independent
implementation.

    python3 tests/data/make_golden.py tests/data/nifti
"""
import json
import sys
from pathlib import Path

import nibabel as nib
import numpy as np


def save(img, out, name, cases, note):
    path = out / name
    nib.save(img, str(path))
    back = nib.load(str(path))
    hdr = back.header
    cases.append({
        "file": name,
        "note": note,
        "dims": [int(d) for d in back.shape[:3]],
        "datatype": int(hdr["datatype"]),
        "bitpix": int(hdr["bitpix"]),
        "pixdim": [float(p) for p in hdr["pixdim"]],
        # the loaded header reports 0; the proxy holds the on-disk offset
        "vox_offset": float(back.dataobj.offset),
        "big_endian": hdr.endianness == ">",
        # x-fastest order, as stored on disk
        "values": [float(v) for v in np.asarray(back.get_fdata(), dtype=np.float64).ravel(order="F")],
    })


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "nifti")
    out.mkdir(parents=True, exist_ok=True)
    cases = []
    affine = np.diag([1.5, 2.0, 2.5, 1.0])

    f32 = (np.arange(64, dtype=np.float32) * 0.5 - 3.25).reshape((4, 4, 4), order="F")
    img = nib.Nifti1Image(f32, affine)
    img.header.set_xyzt_units("mm", "sec")
    save(img, out, "float32_4x4x4.nii", cases, "float32, anisotropic spacing")

    be = nib.Nifti1Image(f32.astype(">f4"), affine, header=nib.Nifti1Header(endianness=">"))
    save(be, out, "float32_4x4x4_be.nii", cases, "same data, big-endian")

    raw = np.array([3, -1, 0, 100, 7, -32768, 32767, 12], dtype=np.int16).reshape((2, 2, 2), order="F")
    i16 = nib.Nifti1Image(raw, np.eye(4))
    i16.header.set_slope_inter(2.0, 1.0)
    save(i16, out, "int16_slope2_inter1.nii", cases, "raw 3 -> 7 via slope 2, inter 1")

    u8 = nib.Nifti1Image(np.arange(27, dtype=np.uint8).reshape((3, 3, 3), order="F") * 9, np.eye(4))
    save(u8, out, "uint8_3x3x3.nii.gz", cases, "uint8, gzip")

    i32 = nib.Nifti1Image(
        (np.arange(24, dtype=np.int32) * 100003 - 1000000).reshape((2, 3, 4), order="F"), np.eye(4))
    save(i32, out, "int32_2x3x4.nii", cases, "int32, non-cubic")

    rng = np.random.default_rng(20240229)
    f64 = nib.Nifti1Image(rng.normal(size=(5, 4, 3)), np.diag([0.5, 0.75, 3.0, 1.0]))
    save(f64, out, "float64_5x4x3.nii.gz", cases, "float64, gzip")

    t4 = nib.Nifti1Image(f32.reshape((4, 4, 4, 1)), affine)
    save(t4, out, "float32_singleton_t.nii", cases, "4D with a singleton time axis")

    # RGB24 (datatype 128) is outside the supported set.
    rgb_type = np.dtype([("R", "u1"), ("G", "u1"), ("B", "u1")])
    rgb = np.zeros((2, 2, 2), dtype=rgb_type)
    nib.save(nib.Nifti1Image(rgb, np.eye(4)), str(out / "rgb24.nii"))

    (out / "golden.json").write_text(json.dumps({"generator": "nibabel " + nib.__version__,
                                                  "cases": cases}, indent=1) + "\n")


if __name__ == "__main__":
    main()
