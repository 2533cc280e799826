/** Draws download with integrity verification against the service's hash. */

import { ApiError } from "./api.js";
import type { FetchLike } from "./api.js";

export class IntegrityError extends Error {
  constructor(
    public readonly expected: string,
    public readonly actual: string,
  ) {
    super(`downloaded bytes hash ${actual} does not match service hash ${expected}`);
    this.name = "IntegrityError";
  }
}

export function downloadFilename(player: string, season: number): string {
  return `${player}_${season}_epaa.jsonl`;
}

export async function sha256Hex(data: ArrayBuffer): Promise<string> {
  const digest = await crypto.subtle.digest("SHA-256", data);
  return Array.from(new Uint8Array(digest))
    .map((b) => b.toString(16).padStart(2, "0"))
    .join("");
}

export interface VerifiedDownload {
  bytes: ArrayBuffer;
  hash: string;
  filename: string;
}

/** Fetch the persisted draws file verbatim and verify its content hash
 * against the X-Content-SHA256 header before handing it to the browser. */
export async function fetchDrawsVerified(
  url: string,
  player: string,
  season: number,
  fetchFn?: FetchLike,
): Promise<VerifiedDownload> {
  const doFetch: FetchLike = fetchFn ?? ((u) => fetch(u));
  const response = await doFetch(url);
  if (!response.ok) {
    throw new ApiError(response.status, `download failed (${response.status})`);
  }
  const bytes = await response.arrayBuffer();
  const hash = await sha256Hex(bytes);
  const expected = response.headers.get("x-content-sha256");
  if (expected && expected !== hash) {
    throw new IntegrityError(expected, hash);
  }
  return { bytes, hash, filename: downloadFilename(player, season) };
}

/** Hand verified bytes to the browser as a file download. */
export function saveToDisk(download: VerifiedDownload, doc: Document): void {
  const blob = new Blob([download.bytes], { type: "application/jsonl" });
  const url = URL.createObjectURL(blob);
  const anchor = doc.createElement("a");
  anchor.href = url;
  anchor.download = download.filename;
  doc.body.appendChild(anchor);
  anchor.click();
  anchor.remove();
  URL.revokeObjectURL(url);
}
