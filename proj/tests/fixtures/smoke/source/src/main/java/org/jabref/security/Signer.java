package org.jabref.security;

import java.security.MessageDigest;

public class Signer {
}
