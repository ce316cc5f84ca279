/**
 * TCP and stdio serving for the scorer protocol. One in-flight request per
 * connection; multiple concurrent connections are fine.
 */

import { createInterface } from "node:readline";
import { createServer, Server, Socket } from "node:net";
import { Readable, Writable } from "node:stream";

import { JointLinearModel } from "./model.js";
import { handleLine } from "./protocol.js";

export function serveConnection(model: JointLinearModel, input: Readable, output: Writable): Promise<void> {
  return new Promise((resolve) => {
    const rl = createInterface({ input, crlfDelay: Infinity });
    rl.on("line", (line) => {
      if (!line.trim()) return;
      output.write(handleLine(model, line) + "\n");
    });
    rl.on("close", resolve);
  });
}

export function startServer(model: JointLinearModel, port = 0, host = "127.0.0.1"): Promise<Server> {
  const server = createServer((socket: Socket) => {
    socket.on("error", () => socket.destroy());
    void serveConnection(model, socket, socket);
  });
  return new Promise((resolve, reject) => {
    server.once("error", reject);
    server.listen(port, host, () => resolve(server));
  });
}
