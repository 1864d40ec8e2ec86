/** CSV export of per-reason tag counts, matching the review summary endpoint. */

import type { ReviewSummary } from "./api.js";

function escapeField(value: string): string {
  if (/[",\n]/.test(value)) {
    return `"${value.replaceAll('"', '""')}"`;
  }
  return value;
}

export function reasonCountsCsv(summary: ReviewSummary): string {
  const lines = ["reason_id,text,count"];
  for (const row of summary.reasons) {
    lines.push(`${row.reason_id},${escapeField(row.text)},${row.count}`);
  }
  return lines.join("\n") + "\n";
}
