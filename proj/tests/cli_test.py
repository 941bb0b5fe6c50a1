"""End-to-end checks for the retcore binary: exit codes, artifact formats,
config file handling and seed reproducibility.

Usage: cli_test.py <retcore-binary> <vocab-file>
"""

import json
import os
import struct
import subprocess
import sys
import tempfile

BIN = sys.argv[1]
VOCAB_SRC = sys.argv[2]

PASSED = 0


def run(*args, env=None, stdin=None):
    merged = dict(os.environ)
    merged.pop("RETCORE_THREADS", None)
    if env:
        merged.update(env)
    return subprocess.run(
        [BIN, *args], capture_output=True, text=True, env=merged, input=stdin
    )


def check(name, cond, extra=""):
    global PASSED
    if not cond:
        print(f"FAIL {name} {extra}")
        sys.exit(1)
    PASSED += 1
    print(f"ok {name}")


def data_lines(text):
    return [line for line in text.splitlines() if line and not line.startswith("#")]


def read_container(path):
    """Parse the .rvec container: magic, version, JSON header, float32 payload."""
    with open(path, "rb") as f:
        blob = f.read()
    assert blob[:4] == b"RVEC", "bad magic"
    version, hlen = struct.unpack("<II", blob[4:12])
    header = json.loads(blob[12 : 12 + hlen])
    payload = blob[12 + hlen :]
    return version, header, struct.unpack(f"<{len(payload) // 4}f", payload)


def main():
    tmp = tempfile.mkdtemp(prefix="retcore_cli_")
    vocab = os.path.join(tmp, "vocab.txt")
    with open(VOCAB_SRC) as src:
        words = [w.strip() for w in src if w.strip()][:100]
    with open(vocab, "w") as out:
        out.write("\n".join(words) + "\n")

    # --- exit code contract ---------------------------------------------
    r = run()
    check("no args exits 1 with usage", r.returncode == 1 and "Usage" in r.stdout + r.stderr)
    r = run("encode", "--help")
    check("encode --help exits 0", r.returncode == 0 and "--max-word-len" in r.stdout)
    r = run("--version")
    check("--version", r.returncode == 0 and "0.1.0" in r.stdout and "format 1" in r.stdout)
    r = run("frobnicate")
    check("unknown subcommand rejected", r.returncode != 0)
    r = run("train", "--vocab", vocab, "--beta", "-1")
    check("invalid --beta exits 1 naming the field",
          r.returncode == 1 and "--beta" in r.stderr, r.stderr)
    r = run("embed", "--weights", os.path.join(tmp, "missing.rvec"), "--input", vocab)
    check("missing weights file exits 2", r.returncode == 2 and "io error" in r.stderr)
    r = run("encode", "--input", vocab, "--bits-per-char", "4")
    check("out-of-range codepoint exits 3", r.returncode == 3, r.stderr)

    # --- encode ------------------------------------------------------------
    words_file = os.path.join(tmp, "words.txt")
    with open(words_file, "w") as out:
        out.write("hello\nworld\nkitten\n")
    r = run("encode", "--input", words_file, "--format", "csv")
    rows = data_lines(r.stdout)
    check("encode csv shape", r.returncode == 0 and len(rows) == 3
          and all(len(row.split(",")) == 384 for row in rows))
    values = {v for row in rows for v in row.split(",")}
    check("encode csv is 0/1", values.issubset({"0", "1"}))

    bin_path = os.path.join(tmp, "bits.rvec")
    r = run("encode", "--input", words_file, "--format", "bin", "--out", bin_path)
    check("encode bin exits 0", r.returncode == 0)
    version, header, payload = read_container(bin_path)
    check("bin container header", version == 1
          and header["tensors"][0]["name"] == "bits"
          and header["tensors"][0]["shape"] == [3, 384]
          and header["run_config"]["command"] == "encode")
    csv_values = [float(v) for row in rows for v in row.split(",")]
    check("bin payload matches csv", list(payload) == csv_values)
    r = run("encode", "--input", words_file, "--format", "bin")
    check("bin without --out exits 1", r.returncode == 1 and "--out" in r.stderr)

    # --- train / embed -------------------------------------------------------
    weights = os.path.join(tmp, "w.rvec")
    log_path = os.path.join(tmp, "train.csv")
    r = run("train", "--vocab", vocab, "--steps", "120", "--batch-size", "32",
            "--warmup", "10", "--seed", "7", "--out", weights, "--log", log_path)
    check("train exits 0", r.returncode == 0, r.stderr)
    log_rows = data_lines(open(log_path).read())
    check("train log is step,lr,loss", log_rows[0] == "step,lr,loss" and len(log_rows) == 121
          and log_rows[1].startswith("1,"))
    losses = [float(row.split(",")[2]) for row in log_rows[1:]]
    head = sum(losses[:10]) / 10
    tail = sum(losses[-10:]) / 10
    check("train loss falls", tail < head, f"{head} -> {tail}")
    _, header, _ = read_container(weights)
    check("weights header echoes resolved config",
          header["run_config"]["seed"] == 7 and header["run_config"]["steps"] == 120
          and header["config"]["embedding_dim"] == 256)

    r = run("embed", "--weights", weights, "--input", words_file)
    emb_rows = data_lines(r.stdout)
    check("embed csv shape", r.returncode == 0 and len(emb_rows) == 3
          and all(len(row.split(",")) == 256 for row in emb_rows))

    # --- reproducibility ---------------------------------------------------
    out_a = os.path.join(tmp, "repro.rvec")
    run("train", "--vocab", vocab, "--steps", "20", "--batch-size", "16",
        "--warmup", "5", "--seed", "11", "--out", out_a)
    blob_a = open(out_a, "rb").read()
    run("train", "--vocab", vocab, "--steps", "20", "--batch-size", "16",
        "--warmup", "5", "--seed", "11", "--out", out_a)
    check("same seed, same invocation, identical bytes", blob_a == open(out_a, "rb").read())
    run("train", "--vocab", vocab, "--steps", "20", "--batch-size", "16",
        "--warmup", "5", "--seed", "12", "--out", out_a)
    check("different seed differs", blob_a != open(out_a, "rb").read())

    # --- augment / dataset ----------------------------------------------
    r = run("augment", "--vocab", vocab, "--count", "2", "--seed", "5")
    aug_rows = data_lines(r.stdout)
    check("augment tsv shape", r.returncode == 0 and len(aug_rows) == 200
          and all(len(row.split("\t")) == 2 for row in aug_rows))
    check("augment clean column matches vocab",
          [row.split("\t")[0] for row in aug_rows] == [w for w in words for _ in range(2)])
    r2 = run("augment", "--vocab", vocab, "--count", "2", "--seed", "5")
    check("augment reproducible", r.stdout == r2.stdout)

    r = run("dataset", "--vocab", vocab, "--views", "4", "--augmented", "2",
            "--random-fraction", "0.1", "--seed", "3")
    ds_rows = data_lines(r.stdout)
    check("dataset tsv shape", r.returncode == 0 and len(ds_rows) == (100 + 10) * 4
          and all(len(row.split("\t")) == 3 for row in ds_rows))
    check("dataset flags are 0/1",
          {row.split("\t")[1] for row in ds_rows} == {"0", "1"})

    # --- eval ----------------------------------------------------------------
    r = run("eval", "similarity", "--weights", weights, "--vocab", vocab,
            "--pairs", "50", "--seed", "3")
    sim_rows = data_lines(r.stdout)
    check("eval similarity csv", r.returncode == 0
          and sim_rows[0] == "group,n_pairs,mean,stddev,min,p25,median,p75,max"
          and len(sim_rows) == 3 and "separation" in r.stderr)
    vocab_mean = float(sim_rows[1].split(",")[2])
    random_mean = float(sim_rows[2].split(",")[2])
    check("similarity separates groups", vocab_mean > random_mean)

    r = run("eval", "recover", "--weights", weights, "--vocab", vocab,
            "--queries", "50", "--edits", "1")
    rec_rows = data_lines(r.stdout)
    check("eval recover csv", r.returncode == 0 and rec_rows[0] == "edits,queries,recovery"
          and len(rec_rows) == 3 and rec_rows[1].startswith("0,50,"))
    check("zero edits recover perfectly", float(rec_rows[1].split(",")[2]) == 1.0)

    corpus = os.path.join(tmp, "corpus.txt")
    with open(corpus, "w") as out:
        out.write("the quick brown fox jumps over the lazy dog\nplain second line here\n")
    typo_out = os.path.join(tmp, "typo.txt")
    r = run("eval", "typo", "--input", corpus, "--rate", "0.5", "--seed", "2",
            "--out", typo_out)
    corrupted = open(typo_out).read()
    original = open(corpus).read()
    check("eval typo corrupts words", r.returncode == 0 and corrupted != original
          and len(corrupted.splitlines()) == 2)
    r = run("eval", "typo", "--input", corpus, "--rate", "0", "--out", typo_out)
    check("rate 0 is byte-faithful", open(typo_out).read() == original)

    proj_dir = os.path.join(tmp, "proj")
    r = run("eval", "export", "--weights", weights, "--vocab", vocab, "--out-dir", proj_dir)
    check("eval export writes tsvs", r.returncode == 0
          and os.path.exists(os.path.join(proj_dir, "vectors.tsv"))
          and os.path.exists(os.path.join(proj_dir, "metadata.tsv"))
          and os.path.exists(os.path.join(proj_dir, "run_config.json")))
    vec_rows = open(os.path.join(proj_dir, "vectors.tsv")).read().splitlines()
    check("export vectors shape", len(vec_rows) == 100
          and all(len(row.split("\t")) == 256 for row in vec_rows))

    # --- bench ------------------------------------------------------------
    r = run("bench", "--input", vocab, "--mode", "raw", "--threads", "2")
    report = json.loads(r.stdout)
    check("bench raw json", r.returncode == 0 and report["mode"] == "raw"
          and report["tokens_processed"] == 100 and report["thread_count"] == 2
          and report["config"]["command"] == "bench")
    digest = report["output_digest"]
    r = run("bench", "--input", vocab, "--mode", "raw", "--threads", "1")
    check("bench digest thread-invariant", json.loads(r.stdout)["output_digest"] == digest)
    r = run("bench", "--input", vocab, "--mode", "model", "--weights", weights, "--preload")
    check("bench model mode", r.returncode == 0
          and json.loads(r.stdout)["mode"] == "model")
    r = run("bench", "--input", vocab, "--mode", "model")
    check("bench model without weights exits 1", r.returncode == 1)

    # --- config files ---------------------------------------------------
    toml_cfg = os.path.join(tmp, "cfg.toml")
    with open(toml_cfg, "w") as out:
        out.write(f'[augment]\nvocab = "{vocab}"\ncount = 2\nseed = 9\n')
    json_cfg = os.path.join(tmp, "cfg.json")
    with open(json_cfg, "w") as out:
        json.dump({"augment": {"vocab": vocab, "count": 2, "seed": 9}}, out)
    r_toml = run("--config", toml_cfg, "augment")
    r_json = run("--config", json_cfg, "augment")
    check("toml and json configs agree", r_toml.returncode == 0
          and r_toml.stdout == r_json.stdout)
    r = run("--config", toml_cfg, "augment", "--count", "1")
    check("flags override config file", len(data_lines(r.stdout)) == 100)
    r = run("augment", "--config", toml_cfg)
    check("--config after subcommand", r.returncode == 0 and r.stdout == r_toml.stdout)
    r = run("--config", os.path.join(tmp, "nope.toml"), "augment", "--vocab", vocab)
    check("missing config file rejected", r.returncode == 1)

    # --- threads env var --------------------------------------------------
    r = run("bench", "--input", vocab, "--mode", "raw", env={"RETCORE_THREADS": "3"})
    check("RETCORE_THREADS honored", json.loads(r.stdout)["thread_count"] == 3)
    r = run("bench", "--input", vocab, "--mode", "raw", env={"RETCORE_THREADS": "zero"})
    check("bad RETCORE_THREADS exits 1", r.returncode == 1 and "RETCORE_THREADS" in r.stderr)
    r = run("bench", "--input", vocab, "--mode", "raw", "--threads", "2",
            env={"RETCORE_THREADS": "zero"})
    check("--threads beats the env var", r.returncode == 0
          and json.loads(r.stdout)["thread_count"] == 2)

    # --- stdin ------------------------------------------------------------
    r = run("encode", "--input", "-", stdin="one\ntwo\n")
    check("stdin input", r.returncode == 0 and len(data_lines(r.stdout)) == 2)

    print(f"{PASSED} cli checks passed")


if __name__ == "__main__":
    main()
