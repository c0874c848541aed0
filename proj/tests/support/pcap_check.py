#!/usr/bin/env python3
"""Independent classic-pcap parser used as a reference oracle in tests.

Written directly from the published pcap, Ethernet, IPv4 and UDP layouts;
shares no code with the C++ implementation. Prints one line per UDP
record: "<dst_port> <ts_sec>.<ts_usec:06d> <payload_crc32:08x>".
"""

import struct
import sys
import zlib


def main(path: str) -> int:
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < 24:
        print("short file", file=sys.stderr)
        return 1

    magic = struct.unpack("<I", data[:4])[0]
    if magic == 0xA1B2C3D4:
        endian, nanos = "<", False
    elif magic == 0xA1B23C4D:
        endian, nanos = "<", True
    elif magic == 0xD4C3B2A1:
        endian, nanos = ">", False
    elif magic == 0x4D3CB2A1:
        endian, nanos = ">", True
    else:
        print("bad magic", file=sys.stderr)
        return 1

    (v_major, v_minor, _tz, _sig, _snap, network) = struct.unpack(
        endian + "HHiIII", data[4:24]
    )
    if (v_major, v_minor) != (2, 4):
        print(f"unexpected version {v_major}.{v_minor}", file=sys.stderr)
        return 1
    if network != 1:  # Ethernet
        print(f"unexpected link type {network}", file=sys.stderr)
        return 1

    pos = 24
    while pos < len(data):
        if pos + 16 > len(data):
            print("truncated record header", file=sys.stderr)
            return 1
        ts_sec, ts_frac, incl, _orig = struct.unpack(endian + "IIII", data[pos : pos + 16])
        pos += 16
        if pos + incl > len(data):
            print("truncated record", file=sys.stderr)
            return 1
        frame = data[pos : pos + incl]
        pos += incl

        if len(frame) < 14 + 20 + 8:
            continue
        ethertype = struct.unpack(">H", frame[12:14])[0]
        if ethertype != 0x0800:
            continue
        ip = frame[14:]
        ihl = (ip[0] & 0x0F) * 4
        if ip[0] >> 4 != 4 or ip[9] != 17 or len(ip) < ihl + 8:
            continue
        # Verify the IPv4 header checksum: emitted files must parse in
        # stock tools, which may validate it.
        words = struct.unpack(f">{ihl // 2}H", ip[:ihl])
        total = sum(words)
        while total >> 16:
            total = (total & 0xFFFF) + (total >> 16)
        if total != 0xFFFF:
            print("bad ipv4 checksum", file=sys.stderr)
            return 1
        udp = ip[ihl:]
        dst_port, udp_len = struct.unpack(">HH", udp[2:6])
        payload = udp[8 : udp_len if udp_len >= 8 else 8]
        usec = ts_frac // 1000 if nanos else ts_frac
        print(f"{dst_port} {ts_sec}.{usec:06d} {zlib.crc32(payload) & 0xFFFFFFFF:08x}")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1]))
