"""External-process backends speaking the scratch-directory protocol.

Each call gets a private scratch directory. The harness writes the
request files there (backbone as PDB, sequences as FASTA), sends the
tool one control line on stdin naming those paths, and reads one
key=value control line back on stdout:

    role=design backbone=<pdb> fixed=<tsv> num_sequences=8 \
        temperature=0.1 seed=7 ca_only=0 out=<fasta>
    -> status=ok sequences=<fasta>

    role=fold sequence=<fasta> out=<pdb>      -> status=ok structure=<pdb>
    role=cluster list=<file> out=<tsv>        -> status=ok clusters=<tsv>
    role=search structure=<pdb> out=<txt>     -> status=ok result=<txt>

A nonzero exit, a malformed response, or a missing output file raises
BackendFailure carrying the captured diagnostics; exceeding the
configured timeout raises BackendTimeout. Scratch directories are
removed on success and kept (and named in the error) on failure.

The external clusterer transparently applies the decoy workaround: when
a plain run fails, it reruns once with one unrelated backbone added and
strips that decoy from the result.
"""

from __future__ import annotations

import os
import shutil
import subprocess
import tempfile
from pathlib import Path

import numpy as np

from ..errors import BackendFailure, BackendTimeout, ConfigurationError
from ..structure_io import (
    ScaffoldRecord,
    parse_backbone_pdb,
    write_scaffold_pdb,
)
from . import wire
from .base import (
    SequenceDesigner,
    StructureClusterer,
    StructurePredictor,
    StructureSearcher,
)


def decoy_trace(length):
    """CA trace of an idealized helix, unrelated to any design task."""
    turns = np.arange(length) * np.deg2rad(100.0)
    return np.stack([2.3 * np.cos(turns), 2.3 * np.sin(turns),
                     1.5 * np.arange(length, dtype=float)], axis=1)


class _ProcessBackend:
    def __init__(self, descriptor):
        self.descriptor = descriptor
        executable = descriptor.command[0]
        if not (shutil.which(executable) or Path(executable).is_file()):
            raise ConfigurationError(
                f"external backend executable not found: {executable}")

    def _invoke(self, control, scratch):
        line = " ".join(f"{key}={value}" for key, value in control.items())
        env = dict(os.environ)
        env.update({k: str(v) for k, v in self.descriptor.environment.items()})
        try:
            proc = subprocess.run(
                list(self.descriptor.command),
                input=line + "\n",
                capture_output=True,
                text=True,
                timeout=self.descriptor.timeout_seconds,
                cwd=self.descriptor.working_dir,
                env=env,
            )
        except subprocess.TimeoutExpired as exc:
            raise BackendTimeout(
                f"{control.get('role')} backend exceeded "
                f"{self.descriptor.timeout_seconds}s (scratch kept at "
                f"{scratch})", stderr=exc.stderr if isinstance(exc.stderr, str)
                else None) from exc
        if proc.returncode != 0:
            raise BackendFailure(
                f"{control.get('role')} backend failed (scratch kept at "
                f"{scratch})", returncode=proc.returncode, stderr=proc.stderr)
        response = self._parse_response(proc.stdout, control, scratch)
        return response

    def _parse_response(self, stdout, control, scratch):
        lines = [l for l in stdout.splitlines() if l.strip()]
        if not lines:
            raise BackendFailure(
                f"{control.get('role')} backend wrote no control line "
                f"(scratch kept at {scratch})")
        response = {}
        for token in lines[-1].split():
            if "=" not in token:
                raise BackendFailure(
                    f"malformed control token {token!r} from "
                    f"{control.get('role')} backend")
            key, value = token.split("=", 1)
            response[key] = value
        if response.get("status") != "ok":
            raise BackendFailure(
                f"{control.get('role')} backend reported "
                f"{response.get('status', 'no status')!r} (scratch kept at "
                f"{scratch}): {response.get('message', '')}")
        return response

    def _read_output(self, response, key, scratch, role):
        path = response.get(key)
        if not path or not Path(path).is_file():
            raise BackendFailure(
                f"{role} backend response lacks a readable {key} file "
                f"(scratch kept at {scratch})")
        return Path(path).read_bytes()

    def _call(self, role, build_request, read_response):
        scratch = Path(tempfile.mkdtemp(prefix=f"motifeval-{role}-"))
        try:
            control = build_request(scratch)
            response = self._invoke(control, scratch)
            result = read_response(response, scratch)
        except BaseException:
            raise  # scratch kept for diagnostics
        shutil.rmtree(scratch, ignore_errors=True)
        return result


class ExternalDesigner(_ProcessBackend, SequenceDesigner):
    def design(self, request):
        def build(scratch):
            hint = "".join(request.fixed_positions.get(i, "G")
                           for i in range(1, len(request.backbone) + 1))
            backbone_path = scratch / "backbone.pdb"
            backbone_path.write_bytes(
                write_scaffold_pdb(request.backbone, sequence=hint))
            fixed_path = scratch / "fixed_positions.tsv"
            fixed_path.write_text(
                "".join(f"{index}\t{aa}\n" for index, aa in
                        sorted(request.fixed_positions.items())),
                encoding="utf-8")
            return {
                "role": "design",
                "backbone": backbone_path,
                "fixed": fixed_path,
                "num_sequences": request.num_sequences,
                "temperature": request.sampling_temperature,
                "seed": "none" if request.seed is None else request.seed,
                "ca_only": int(request.backbone.ca_only),
                "out": scratch / "sequences.fasta",
            }

        def read(response, scratch):
            data = self._read_output(response, "sequences", scratch, "design")
            return wire.parse_fasta(data)

        return self._call("design", build, read)


class ExternalFolder(_ProcessBackend, StructurePredictor):
    def predict(self, sequence, context=None):
        def build(scratch):
            seq_path = scratch / "sequence.fasta"
            seq_path.write_bytes(wire.emit_fasta([sequence]))
            return {
                "role": "fold",
                "sequence": seq_path,
                "out": scratch / "structure.pdb",
            }

        def read(response, scratch):
            data = self._read_output(response, "structure", scratch, "fold")
            return parse_backbone_pdb(data, source_name="external prediction")

        return self._call("fold", build, read)


class ExternalClusterer(_ProcessBackend, StructureClusterer):
    def cluster(self, traces):
        try:
            return self._cluster_once(traces, decoy=False)
        except BackendTimeout:
            raise
        except BackendFailure:
            # Documented prefilter failure mode: rerun with one unrelated
            # backbone added, then drop it from the assignment.
            return self._cluster_once(traces, decoy=True)

    def _cluster_once(self, traces, decoy):
        entries = list(traces)
        if decoy:
            entries.append(decoy_trace(len(traces[0])))
        names = [f"s_{i:03d}.pdb" for i in range(len(entries))]

        def build(scratch):
            paths = []
            for name, trace in zip(names, entries):
                record = ScaffoldRecord(scaffold_index=1, ca=trace,
                                        placements={})
                path = scratch / name
                path.write_bytes(write_scaffold_pdb(record))
                paths.append(path)
            list_path = scratch / "structures.list"
            list_path.write_text(
                "".join(f"{p}\n" for p in paths), encoding="utf-8")
            return {
                "role": "cluster",
                "list": list_path,
                "out": scratch / "clusters.tsv",
            }

        def read(response, scratch):
            data = self._read_output(response, "clusters", scratch, "cluster")
            return wire.parse_clusters_tsv(data, names)

        clusters = self._call("cluster", build, read)
        if decoy:
            decoy_index = len(entries) - 1
            clusters = [[m for m in members if m != decoy_index]
                        for members in clusters]
            clusters = [members for members in clusters if members]
        return clusters


class ExternalSearcher(_ProcessBackend, StructureSearcher):
    def max_tm_to_database(self, trace, label=None):
        def build(scratch):
            record = ScaffoldRecord(scaffold_index=1, ca=np.asarray(trace),
                                    placements={})
            query = scratch / "query.pdb"
            query.write_bytes(write_scaffold_pdb(record))
            return {
                "role": "search",
                "structure": query,
                "out": scratch / "result.txt",
            }

        def read(response, scratch):
            data = self._read_output(response, "result", scratch, "search")
            return wire.parse_tm(data)

        return self._call("search", build, read)
