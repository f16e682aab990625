"""Writes the model round-trip corpus with a plain struct-based writer.

Run from this directory: python3 make_corpus.py
"""
import random
import struct

HEAD = ["x", "y", "z", "nx", "ny", "nz", "f_dc_0", "f_dc_1", "f_dc_2"]
TAIL = ["opacity", "scale_0", "scale_1", "scale_2", "rot_0", "rot_1", "rot_2", "rot_3"]


def write(path, props, rows, comments=()):
    header = ["ply", "format binary_little_endian 1.0"]
    header += ["comment " + c for c in comments]
    header.append("element vertex %d" % len(rows))
    header += ["property %s %s" % (t, n) for t, n in props]
    header.append("end_header")
    fmt = "<" + "".join({"float": "f", "uchar": "B", "double": "d", "int": "i"}[t] for t, _ in props)
    with open(path, "wb") as f:
        f.write(("\n".join(header) + "\n").encode())
        for row in rows:
            f.write(struct.pack(fmt, *row))


def gaussian_row(rng, n_rest):
    pos = [rng.uniform(-20, 20) for _ in range(3)]
    normals = [0.0, 0.0, 0.0]
    dc = [rng.uniform(-2, 2) for _ in range(3)]
    rest = [rng.uniform(-0.3, 0.3) for _ in range(n_rest)]
    opacity = [rng.uniform(-4, 4)]
    scale = [rng.uniform(-6, -1) for _ in range(3)]
    # Trained checkpoints store unnormalized quaternions.
    rot = [rng.gauss(0, 1) for _ in range(4)]
    return pos + normals + dc + rest + opacity + scale + rot


def main():
    rng = random.Random(1234)
    deg3 = [("float", n) for n in HEAD + ["f_rest_%d" % i for i in range(45)] + TAIL]
    write("corpus_sh3.ply", deg3, [gaussian_row(rng, 45) for _ in range(64)])

    deg0 = [("float", n) for n in HEAD + TAIL]
    write("corpus_sh0.ply", deg0, [gaussian_row(rng, 0) for _ in range(17)],
          comments=["generated by make_corpus.py"])

    deg1 = [("float", n) for n in HEAD + ["f_rest_%d" % i for i in range(9)] + TAIL]
    deg1 += [("uchar", "cluster"), ("double", "confidence")]
    rows = []
    for _ in range(33):
        rows.append(gaussian_row(rng, 9) + [rng.randrange(256), rng.random()])
    write("corpus_sh1_extra.ply", deg1, rows)


if __name__ == "__main__":
    main()
