#!/usr/bin/env python3
# Copyright 2026 The noisekit Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Reference byte-level BPE tokenization using the `tokenizers` package.

Pre-tokenization matches noisekit: whitespace-split words, every word after
the first prefixed with a space, bytes mapped to printable code points. Only
the merge step is delegated to the reference BPE model.

  bpe_reference.py VOCAB MERGES SENTENCES > reference.jsonl
  bpe_reference.py VOCAB MERGES SENTENCES --check reference.jsonl
"""

import argparse
import json
import sys

from tokenizers.models import BPE


def bytes_to_unicode():
    bs = (list(range(ord("!"), ord("~") + 1)) +
          list(range(ord("\xa1"), ord("\xac") + 1)) +
          list(range(ord("\xae"), ord("\xff") + 1)))
    cs = bs[:]
    n = 0
    for b in range(256):
        if b not in bs:
            bs.append(b)
            cs.append(256 + n)
            n += 1
    return dict(zip(bs, map(chr, cs)))


def encode(model, byte_map, text):
    tokens = []
    for i, word in enumerate(text.split()):
        piece = (" " + word) if i else word
        mapped = "".join(byte_map[b] for b in piece.encode("utf-8"))
        tokens.extend(t.value for t in model.tokenize(mapped))
    return tokens


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("vocab")
    parser.add_argument("merges")
    parser.add_argument("sentences")
    parser.add_argument("--check", help="compare against an existing reference file")
    args = parser.parse_args()

    model = BPE.from_file(args.vocab, args.merges)
    byte_map = bytes_to_unicode()
    with open(args.sentences, encoding="utf-8") as f:
        sentences = [line.rstrip("\n") for line in f]
    rows = [{"text": s, "tokens": encode(model, byte_map, s)} for s in sentences]

    if args.check:
        with open(args.check, encoding="utf-8") as f:
            expected = [json.loads(line) for line in f if line.strip()]
        if expected != rows:
            for want, got in zip(expected, rows):
                if want != got:
                    print(f"mismatch on {got['text']!r}:\n  committed {want['tokens']}\n"
                          f"  reference {got['tokens']}", file=sys.stderr)
            return 1
        print(f"{len(rows)} sentences match")
        return 0

    for row in rows:
        print(json.dumps(row, ensure_ascii=False))
    return 0


if __name__ == "__main__":
    sys.exit(main())
