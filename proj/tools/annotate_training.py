#!/usr/bin/env python3
# Copyright 2026 The exchat Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Converts bracket-annotated training utterances to training JSONL.

Input lines look like

    ask-yes-no-question ask-if-system-ate | Did you have [sushi](food-drink)?

Token spans are computed with the same word/punctuation rules as the C++
tokenizer (ASCII input only).
"""

import argparse
import json
import re
import sys

SLOT = re.compile(r"\[([^\]]+)\]\(([A-Za-z0-9_-]+)\)")
WORD = re.compile(r"[A-Za-z0-9\x80-\xff]+(?:['&-][A-Za-z0-9\x80-\xff]+)*")


def tokenize(text):
    tokens, i = [], 0
    while i < len(text):
        if text[i].isspace():
            i += 1
            continue
        m = WORD.match(text, i)
        if m:
            tokens.append(m.group(0))
            i = m.end()
        else:
            tokens.append(text[i])
            i += 1
    return tokens


def convert(line):
    labels, _, body = line.partition("|")
    supertype, type_ = labels.split()
    body = body.strip()
    text, slots, pos = "", [], 0
    for m in SLOT.finditer(body):
        text += body[pos:m.start()]
        start = len(tokenize(text))
        text += m.group(1)
        slots.append({"class": m.group(2), "start": start, "end": len(tokenize(text))})
        pos = m.end()
    text += body[pos:]
    return {"text": text, "supertype": supertype, "type": type_, "slots": slots}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("source")
    ap.add_argument("-o", "--output", default="-")
    args = ap.parse_args()
    out = sys.stdout if args.output == "-" else open(args.output, "w", encoding="utf-8")
    with open(args.source, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            out.write(json.dumps(convert(line), ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main()
